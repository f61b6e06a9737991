//! Generators for explicit displacement fields: vortex liftings with
//! prescribed cuts, discrete vortices, the even/odd half-vortices, and the
//! recovery configuration that glues core minimizers to a far field built
//! from exact liftings and a two-coloring of the fault chords.

use crate::continuum::{AngleField, SingularityConfig};
use crate::error::{CoreError, Result};
use crate::fields::DisplacementField;
use crate::lattice::{self, BoundaryLayer, Domain, LatticeGeometry, Site, SublatticeTag};
use crate::minimize::{solve, EnergyKind, MinimizationProblem, SolverOptions};
use crate::stacking::{local_side, resolves_tension, two_coloring, EndpointKind, FaultSegment, Side, StackingFault, TwoColoring};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::f64::consts::{PI, TAU};

/// Cut of an angular lifting of the unit vortex: the positive or negative
/// horizontal ray from the center. (A lifting smooth off the full
/// horizontal line with single jumps is one of these two.)
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cut {
    RightRay,
    LeftRay,
}

/// A degree-`±1` vortex lifting with a prescribed cut. On-cut values are
/// the limits from below.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftingSpec {
    pub center: [f64; 2],
    pub degree: i8,
    pub cut: Cut,
}

/// Continuum evaluator of a vortex lifting: `exp(i angle(x)) =
/// ((x - center)/|x - center|)^degree` away from the cut.
#[derive(Clone, Copy, Debug)]
pub struct VortexLifting {
    spec: LiftingSpec,
}

/// Angle of the positive vortex with the given cut, trace from below on
/// the cut.
fn base_angle(y: [f64; 2], cut: Cut) -> f64 {
    let a = y[1].atan2(y[0]);
    match cut {
        Cut::RightRay => {
            // Range (0, 2pi]; on the positive axis the trace from below
            // is 2pi.
            if y[1] == 0.0 && y[0] > 0.0 {
                TAU
            } else if a <= 0.0 {
                a + TAU
            } else {
                a
            }
        }
        Cut::LeftRay => {
            // Range (-pi, pi]; on the negative axis the trace from below
            // is -pi.
            if y[1] == 0.0 && y[0] < 0.0 {
                -PI
            } else {
                a
            }
        }
    }
}

impl VortexLifting {
    pub fn spec(&self) -> &LiftingSpec {
        &self.spec
    }
}

impl AngleField for VortexLifting {
    fn angle(&self, x: [f64; 2]) -> f64 {
        let y = [x[0] - self.spec.center[0], x[1] - self.spec.center[1]];
        self.spec.degree as f64 * base_angle(y, self.spec.cut)
    }

    fn grad(&self, x: [f64; 2]) -> [f64; 2] {
        let y = [x[0] - self.spec.center[0], x[1] - self.spec.center[1]];
        let r2 = y[0] * y[0] + y[1] * y[1];
        let d = self.spec.degree as f64;
        [-d * y[1] / r2, d * y[0] / r2]
    }
}

/// Build the lifting evaluator.
pub fn vortex_lifting(spec: &LiftingSpec) -> VortexLifting {
    assert!(spec.degree == 1 || spec.degree == -1, "degree must be ±1");
    VortexLifting { spec: *spec }
}

/// Move a center off the lattice: a center that coincides with a lattice
/// site is replaced by the barycenter of the cell anchored there.
pub fn snap_center(x0: [f64; 2], geom: &LatticeGeometry) -> [f64; 2] {
    let eps = geom.spacing();
    let f1 = x0[0] / eps;
    let f2 = x0[1] / eps;
    if (f1 - f1.round()).abs() < 1e-12 && (f2 - f2.round()).abs() < 1e-12 {
        [f1.round() * eps + 0.5 * eps, f2.round() * eps + 0.5 * eps]
    } else {
        x0
    }
}

/// Sampled vortex lifting `u(i) = angle(i - center) / (2 pi)` on every
/// site of the domain's bounding box. Returns the field and the center
/// actually used (snapped off the lattice if needed).
pub fn discrete_vortex(
    domain: &Domain,
    geom: &LatticeGeometry,
    spec: &LiftingSpec,
) -> (DisplacementField, [f64; 2]) {
    let center = snap_center(spec.center, geom);
    let lifting = vortex_lifting(&LiftingSpec { center, ..*spec });
    let field = DisplacementField::over_bounding_box(*geom, domain, |s| {
        lifting.angle(geom.position(s)) / TAU
    });
    (field, center)
}

/// Variants of the half-vortex construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HalfVortexVariant {
    /// Even rows carry `theta+/4pi`, odd rows the same lifting shifted by
    /// one half.
    SameCut,
    /// Even rows carry `theta+/4pi`, odd rows `theta-/4pi`: the even and
    /// odd limits jump across opposite rays.
    OppositeCuts,
}

/// The half-vortex displacement of the even/odd sublattice examples:
/// `mu_{2u}` carries a single `+1` charge near the center and the energy
/// grows like `(pi/4) |log eps|`.
pub fn half_vortex_even_odd(
    domain: &Domain,
    geom: &LatticeGeometry,
    x0: [f64; 2],
    variant: HalfVortexVariant,
) -> (DisplacementField, [f64; 2]) {
    let center = snap_center(x0, geom);
    let plus = vortex_lifting(&LiftingSpec { center, degree: 1, cut: Cut::RightRay });
    let minus_cut = vortex_lifting(&LiftingSpec { center, degree: 1, cut: Cut::LeftRay });
    let field = DisplacementField::over_bounding_box(*geom, domain, |s| {
        let p = geom.position(s);
        let even = SublatticeTag::Even.contains(s);
        match variant {
            HalfVortexVariant::SameCut => {
                if even {
                    plus.angle(p) / (2.0 * TAU)
                } else {
                    (plus.angle(p) + TAU) / (2.0 * TAU)
                }
            }
            HalfVortexVariant::OppositeCuts => {
                if even {
                    plus.angle(p) / (2.0 * TAU)
                } else {
                    minus_cut.angle(p) / (2.0 * TAU)
                }
            }
        }
    });
    (field, center)
}

/// Smooth cutoff: 0 on `[0, 5/8]`, 1 on `[7/8, +inf)`.
fn cutoff(t: f64) -> f64 {
    let s = ((t - 0.625) / 0.25).clamp(0.0, 1.0);
    s * s * s * (s * (6.0 * s - 15.0) + 10.0)
}

/// Far-field angle of a resolved configuration: the sum of per-dislocation
/// liftings with cuts along the fault sides.
struct FarField {
    liftings: Vec<(VortexLifting, f64)>,
}

impl FarField {
    fn angle(&self, x: [f64; 2]) -> f64 {
        self.liftings.iter().map(|(l, d)| d * l.angle(x)).sum()
    }
}

/// The chords of the two-coloring: per jump line, the subintervals where
/// the parity of covering lifting cuts disagrees with fault membership.
fn coloring_chords(
    mu: &SingularityConfig,
    sides: &[Side],
    fault: &StackingFault,
    omega: &Domain,
) -> Result<StackingFault> {
    let mut ys: Vec<f64> = mu.points().iter().map(|(x, _)| x[1]).collect();
    ys.extend(fault.segments.iter().map(|s| s.y));
    ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ys.dedup();
    let mut chords = Vec::new();
    for &y in &ys {
        let sections = omega.horizontal_section(y)?;
        if sections.len() != 1 {
            return Err(CoreError::Geometry(
                "coloring needs simply connected horizontal sections".into(),
            ));
        }
        let (a, b) = sections[0];
        // Breakpoints: dislocations on the line and fault endpoints.
        let mut cuts: Vec<f64> = vec![a, b];
        for (x, _) in mu.points() {
            if x[1] == y {
                cuts.push(x[0]);
            }
        }
        for s in &fault.segments {
            if s.y == y {
                cuts.push(s.x1);
                cuts.push(s.x2);
            }
        }
        cuts.sort_by(|p, q| p.partial_cmp(q).unwrap());
        cuts.dedup();
        // Merge consecutive subintervals where the coloring must jump.
        let mut flagged: Vec<(f64, f64)> = Vec::new();
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            if mid <= a || mid >= b {
                continue;
            }
            let mut parity = 0usize;
            for ((x, _), side) in mu.points().iter().zip(sides) {
                if x[1] != y {
                    continue;
                }
                let covers = match side {
                    Side::Right => mid > x[0],
                    Side::Left => mid < x[0],
                };
                if covers {
                    parity += 1;
                }
            }
            let in_fault = fault
                .segments
                .iter()
                .any(|s| s.y == y && mid > s.x1 && mid < s.x2);
            if (parity % 2 == 1) != in_fault {
                match flagged.last_mut() {
                    Some(last) if (last.1 - w[0]).abs() < GEOM_EPS => last.1 = w[1],
                    _ => flagged.push((w[0], w[1])),
                }
            }
        }
        for (l, r) in flagged {
            chords.push(FaultSegment {
                y,
                x1: l,
                x2: r,
                left: EndpointKind::Boundary,
                right: EndpointKind::Boundary,
            });
        }
    }
    Ok(StackingFault { segments: chords })
}

const GEOM_EPS: f64 = 1e-12;

/// Core minimizer with shifted vortex data: the doubled displacement is
/// prescribed as `(theta_cut(i - center) + shift)/(2 pi)` on the double
/// boundary layer of `B_sigma(center)`.
fn pedge_core_with_data(
    eps: f64,
    sigma: f64,
    center: [f64; 2],
    alpha: f64,
    cut: Cut,
    shift: f64,
    options: &SolverOptions,
) -> Result<DisplacementField> {
    let geom = LatticeGeometry::new(eps)?;
    let domain = Domain::disc(center, sigma);
    let lifting = vortex_lifting(&LiftingSpec { center, degree: 1, cut });
    let all = lattice::sites(&domain, &geom, None);
    let ring = lattice::discrete_boundary(&domain, &geom, BoundaryLayer::Double);
    let ring_set: HashSet<Site> = ring.iter().copied().collect();
    let sample = |s: Site| (lifting.angle(geom.position(s)) + shift) / (2.0 * TAU);
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
    let (field, _) = solve(&problem)?;
    Ok(field)
}

/// The recovery configuration: inside `B_{sigma/2}(x_h)` a partial-edge
/// core minimizer, in the annulus a cutoff interpolation towards the far
/// field, outside the sum of exact vortex liftings with cuts along the
/// fault plus the two-coloring correction.
pub fn recovery_configuration(
    omega: &Domain,
    geom: &LatticeGeometry,
    mu: &SingularityConfig,
    fault: &StackingFault,
    sigma: f64,
    alpha: f64,
    options: &SolverOptions,
) -> Result<DisplacementField> {
    if mu.is_empty() {
        if !fault.segments.is_empty() {
            return Err(CoreError::BadArgument(
                "a fault without dislocations is not a recovery input".into(),
            ));
        }
        let sites = lattice::sites(omega, geom, None);
        return Ok(DisplacementField::from_sites(*geom, &sites, |_| 0.0));
    }
    if !resolves_tension(fault, mu, omega, sigma)? {
        return Err(CoreError::Geometry(
            "the fault does not resolve dislocation tension at this sigma".into(),
        ));
    }
    let eps = geom.spacing();
    if sigma / 2.0 <= 8.0 * eps {
        return Err(CoreError::BadArgument(format!(
            "recovery needs sigma/2 > 8 eps (sigma = {sigma}, eps = {eps})"
        )));
    }

    // Per-dislocation fault side and lifting.
    let mut sides = Vec::with_capacity(mu.len());
    for (x, _) in mu.points() {
        sides.push(local_side(fault, *x, sigma).ok_or_else(|| {
            CoreError::Geometry("missing local ray at a dislocation".into())
        })?);
    }
    let far = FarField {
        liftings: mu
            .points()
            .iter()
            .zip(&sides)
            .map(|((x, d), side)| {
                let cut = match side {
                    Side::Right => Cut::RightRay,
                    Side::Left => Cut::LeftRay,
                };
                (vortex_lifting(&LiftingSpec { center: *x, degree: 1, cut }), *d as f64)
            })
            .collect(),
    };

    // Two-coloring of the chord set where the lifting jumps disagree with
    // the fault.
    let chords = coloring_chords(mu, &sides, fault, omega)?;
    let chi: TwoColoring = two_coloring(&chords, omega)?;

    // Mean-matched rotation constant per core over the gluing annulus
    // A_{5s/8, 7s/8}(x_h), and the core minimizers.
    let mut cores: Vec<(DisplacementField, f64)> = Vec::new();
    for (((x, d), side), _) in mu.points().iter().zip(&sides).zip(0..) {
        let cut = match side {
            Side::Right => Cut::RightRay,
            Side::Left => Cut::LeftRay,
        };
        let own = vortex_lifting(&LiftingSpec { center: *x, degree: 1, cut });
        let mut sum = 0.0;
        let mut count = 0usize;
        let annulus_lo = 0.625 * sigma;
        let annulus_hi = 0.875 * sigma;
        let probe = Domain::disc(*x, annulus_hi);
        for s in lattice::sites(&probe, geom, None) {
            let p = geom.position(s);
            let r = ((p[0] - x[0]).powi(2) + (p[1] - x[1]).powi(2)).sqrt();
            if r >= annulus_lo && r <= annulus_hi {
                sum += *d as f64 * far.angle(p) - own.angle(p);
                count += 1;
            }
        }
        let shift = if count > 0 { sum / count as f64 } else { 0.0 };
        let core = pedge_core_with_data(eps, sigma / 2.0, *x, alpha, cut, shift, options)?;
        cores.push((core, shift));
    }

    let sites = lattice::sites(omega, geom, None);
    let field = DisplacementField::from_sites(*geom, &sites, |s| {
        let p = geom.position(s);
        let chi_term = chi.value(p) / TAU;
        // Locate the dislocation ball containing this site, if any.
        for (h, (x, d)) in mu.points().iter().enumerate() {
            let r = ((p[0] - x[0]).powi(2) + (p[1] - x[1]).powi(2)).sqrt();
            if r <= sigma / 2.0 {
                let (core, _) = &cores[h];
                let v = core.get(s).unwrap_or_else(|| {
                    // Ball sites outside the core's open disc (exact
                    // boundary): fall back to the prescribed data form.
                    let side = sides[h];
                    let cut = match side {
                        Side::Right => Cut::RightRay,
                        Side::Left => Cut::LeftRay,
                    };
                    let own = vortex_lifting(&LiftingSpec { center: *x, degree: 1, cut });
                    (own.angle(p) + cores[h].1) / (2.0 * TAU)
                });
                return *d as f64 * v + chi_term;
            }
            if r <= sigma {
                let side = sides[h];
                let cut = match side {
                    Side::Right => Cut::RightRay,
                    Side::Left => Cut::LeftRay,
                };
                let own = vortex_lifting(&LiftingSpec { center: *x, degree: 1, cut });
                let theta_h = *d as f64 * (own.angle(p) + cores[h].1);
                let eta = cutoff(r / sigma);
                let blended = theta_h + eta * (far.angle(p) - theta_h);
                return blended / (2.0 * TAU) + chi_term;
            }
        }
        far.angle(p) / (2.0 * TAU) + chi_term
    });
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energies::{energy_pedge, energy_screw, verify_comparisons, PotentialParams};
    use crate::fields::double;
    use crate::stacking::fault_crossings;
    use crate::vorticity::{block_boundary_loop, vorticity_measure, winding_number, ScanLattice};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lifting_exponential_identity() {
        let spec = LiftingSpec { center: [0.0, 0.0], degree: 1, cut: Cut::RightRay };
        let lift = vortex_lifting(&spec);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let x = [rng.gen::<f64>() * 4.0 - 2.0, rng.gen::<f64>() * 4.0 - 2.0];
            if x[0] * x[0] + x[1] * x[1] < 1e-6 {
                continue;
            }
            let a = lift.angle(x);
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            assert!((a.cos() - x[0] / r).abs() < 1e-12);
            assert!((a.sin() - x[1] / r).abs() < 1e-12);
        }
    }

    #[test]
    fn right_cut_jump_is_two_pi() {
        let lift = vortex_lifting(&LiftingSpec {
            center: [0.0, 0.0],
            degree: 1,
            cut: Cut::RightRay,
        });
        let above = lift.angle([1.0, 1e-12]);
        let below = lift.angle([1.0, -1e-12]);
        assert!((below - above - TAU).abs() < 1e-6);
        // On-cut value equals the trace from below.
        let on = lift.angle([1.0, 0.0]);
        assert!((on - TAU).abs() < 1e-9);
        // Smooth across the left ray.
        let l_above = lift.angle([-1.0, 1e-12]);
        let l_below = lift.angle([-1.0, -1e-12]);
        assert!((l_above - l_below).abs() < 1e-6);
    }

    #[test]
    fn left_cut_jump_is_two_pi() {
        let lift = vortex_lifting(&LiftingSpec {
            center: [0.0, 0.0],
            degree: 1,
            cut: Cut::LeftRay,
        });
        let above = lift.angle([-1.0, 1e-12]);
        let below = lift.angle([-1.0, -1e-12]);
        assert!((above - below - TAU).abs() < 1e-6);
        assert!((lift.angle([-1.0, 0.0]) + PI).abs() < 1e-9);
        // Smooth across the right ray.
        assert!((lift.angle([1.0, 1e-12]) - lift.angle([1.0, -1e-12])).abs() < 1e-6);
    }

    #[test]
    fn negative_degree_negates_winding() {
        let geom = LatticeGeometry::new(0.25).unwrap();
        let domain = Domain::disc([0.0, 0.0], 1.5);
        for degree in [1i8, -1] {
            let (u, _) = discrete_vortex(
                &domain,
                &geom,
                &LiftingSpec { center: [0.0, 0.0], degree, cut: Cut::RightRay },
            );
            let w =
                winding_number(&u, &block_boundary_loop(Site::new(-3, -3), Site::new(2, 2)))
                    .unwrap();
            assert_eq!(w, degree as i64);
        }
    }

    #[test]
    fn discrete_vortex_has_one_central_charge() {
        let geom = LatticeGeometry::new(0.125).unwrap();
        let domain = Domain::disc([0.0, 0.0], 1.0);
        let (u, center) = discrete_vortex(
            &domain,
            &geom,
            &LiftingSpec { center: [0.0, 0.0], degree: 1, cut: Cut::RightRay },
        );
        // Lattice center snapped to a barycenter.
        assert_eq!(center, [0.0625, 0.0625]);
        let mu = vorticity_measure(&u, &domain, ScanLattice::Base).unwrap();
        assert_eq!(mu.total_charge(), 1);
        assert_eq!(mu.charges.len(), 1);
        let c = mu.charges[0];
        assert!(((c.x - center[0]).powi(2) + (c.y - center[1]).powi(2)).sqrt() < 1e-12);
    }

    #[test]
    fn vortex_annulus_energy_approaches_pi_log_two() {
        // Screw energy of the sampled lifting over A_{sigma/2, sigma}
        // tends to pi log 2 as eps -> 0.
        let sigma = 0.5;
        let mut last_err = f64::INFINITY;
        for k in [32.0, 64.0, 128.0] {
            let geom = LatticeGeometry::new(1.0 / k).unwrap();
            let outer = Domain::disc([0.0, 0.0], 2.0 * sigma);
            let (u, center) = discrete_vortex(
                &outer,
                &geom,
                &LiftingSpec { center: [0.0, 0.0], degree: 1, cut: Cut::RightRay },
            );
            let ann = Domain::annulus(center, sigma / 2.0, sigma);
            let e = energy_screw(&u, &ann).unwrap();
            let err = (e - PI * 2.0f64.ln()).abs();
            assert!(err < last_err + 0.02, "no trend at eps=1/{k}: {err} vs {last_err}");
            last_err = err;
        }
        assert!(last_err < 0.08, "final gap {last_err}");
    }

    #[test]
    fn half_vortex_charge_and_energy_growth() {
        let omega = Domain::disc([0.0, 0.0], 1.0);
        let params = PotentialParams::new(1.0);
        for variant in [HalfVortexVariant::SameCut, HalfVortexVariant::OppositeCuts] {
            let mut gaps = Vec::new();
            for k in [16.0, 32.0, 64.0, 128.0] {
                let geom = LatticeGeometry::new(1.0 / k).unwrap();
                let (u, _) = half_vortex_even_odd(&omega, &geom, [0.0, 0.0], variant);
                let doubled = double(&u);
                let mu = vorticity_measure(&doubled, &omega, ScanLattice::Base).unwrap();
                assert_eq!(mu.total_charge(), 1, "variant {variant:?} eps=1/{k}");
                let e = energy_pedge(&u, &omega, &params).unwrap().total;
                gaps.push(e - PI / 4.0 * (k as f64).ln());
            }
            // Gap stays bounded along the ladder.
            let spread = gaps
                .iter()
                .cloned()
                .fold(f64::NEG_INFINITY, f64::max)
                - gaps.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(spread < 1.5, "variant {variant:?}: gaps {gaps:?}");
        }
    }

    #[test]
    fn half_vortex_sublattice_shift() {
        // Same-cut variant: even and odd restrictions of exp(2 pi i u)
        // differ by the angle pi away from the cut.
        let omega = Domain::disc([0.0, 0.0], 1.0);
        let geom = LatticeGeometry::new(1.0 / 16.0).unwrap();
        let (u, center) =
            half_vortex_even_odd(&omega, &geom, [0.0, 0.0], HalfVortexVariant::SameCut);
        let v = crate::fields::exp_field(&u, crate::fields::LiftFactor::TwoPi);
        for (s, a) in v.grid.iter() {
            let below = s.offset(0, -1);
            if let Some(b) = v.angle(below) {
                let p = geom.position(s);
                // Stay away from the cut row.
                if p[1] > center[1] + 0.1 || p[1] < center[1] - 0.1 {
                    let diff = (a - b).rem_euclid(TAU);
                    let d = diff.min(TAU - diff);
                    assert!(
                        (d - PI).abs() < 0.35,
                        "rows should be near-antipodal, got {d} at {s:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn generated_fields_satisfy_the_comparison_chain() {
        let omega = Domain::disc([0.0, 0.0], 1.0);
        let geom = LatticeGeometry::new(1.0 / 16.0).unwrap();
        let p = PotentialParams::new(1.0);
        let (v, _) = discrete_vortex(
            &omega,
            &geom,
            &LiftingSpec { center: [0.0, 0.0], degree: 1, cut: Cut::RightRay },
        );
        let (h, _) = half_vortex_even_odd(&omega, &geom, [0.0, 0.0], HalfVortexVariant::SameCut);
        for u in [v, h] {
            let rep = verify_comparisons(&u, &omega, &p).unwrap();
            assert!(rep.all_ok(), "{rep:?}");
        }
    }

    #[test]
    fn recovery_reduces_to_constant_without_singularities() {
        let omega = Domain::disc([0.0, 0.0], 1.0);
        let geom = LatticeGeometry::new(1.0 / 16.0).unwrap();
        let mu = SingularityConfig::empty();
        let u = recovery_configuration(
            &omega,
            &geom,
            &mu,
            &StackingFault::empty(),
            0.25,
            1.0,
            &SolverOptions { restarts: 1, ..Default::default() },
        )
        .unwrap();
        let e = energy_pedge(&u, &omega, &PotentialParams::new(1.0)).unwrap();
        assert_eq!(e.total, 0.0);
    }

    #[test]
    fn recovery_single_vortex_with_right_ray() {
        let omega = Domain::disc([0.0, 0.0], 1.0);
        let geom = LatticeGeometry::new(1.0 / 64.0).unwrap();
        let mu = SingularityConfig::new(vec![([0.0, 0.0], 1)], &omega).unwrap();
        let fault = StackingFault {
            segments: vec![FaultSegment {
                y: 0.0,
                x1: 0.0,
                x2: 1.0,
                left: EndpointKind::Dislocation,
                right: EndpointKind::Boundary,
            }],
        };
        let opts = SolverOptions { restarts: 1, max_sweeps: 3000, ..Default::default() };
        let sigma = 0.4;
        let u = recovery_configuration(&omega, &geom, &mu, &fault, sigma, 1.0, &opts).unwrap();
        // One +1 doubled charge within 2 eps of the center.
        let doubled = double(&u);
        let m = vorticity_measure(&doubled, &omega, ScanLattice::Base).unwrap();
        assert_eq!(m.total_charge(), 1);
        for c in &m.charges {
            let r = (c.x * c.x + c.y * c.y).sqrt();
            assert!(r <= 2.0 * geom.spacing() + 1e-12, "stray charge at r = {r}");
        }
        // Span-2 jump bonds concentrate near the fault: count noninteger
        // nnn increments away from the core and compare with the crossing
        // count of the fault.
        let far_zone = Domain::annulus([0.0325, 0.0325], sigma, 0.9);
        let mut jump_bonds = 0usize;
        for (a, b) in lattice::bonds(&far_zone, &geom, lattice::Direction::E2, 2, None) {
            let d = u.get(b).unwrap() - u.get(a).unwrap();
            if crate::vorticity::dist_int(d) > 0.25 {
                jump_bonds += 1;
            }
        }
        let crossings = fault_crossings(&fault, &far_zone, &geom, 2);
        let diff = (jump_bonds as i64 - crossings as i64).abs();
        assert!(
            diff <= (crossings as i64 / 5).max(8),
            "jump bonds {jump_bonds} vs crossings {crossings}"
        );
        // Energy is affine in alpha with nonnegative slope.
        let e1 = energy_pedge(&u, &omega, &PotentialParams::new(1.0)).unwrap().total;
        let e2 = energy_pedge(&u, &omega, &PotentialParams::new(2.0)).unwrap().total;
        assert!(e2 >= e1);
        let e3 = energy_pedge(&u, &omega, &PotentialParams::new(3.0)).unwrap().total;
        assert!(((e3 - e2) - (e2 - e1)).abs() < 1e-9);
    }

    #[test]
    fn recovery_dipole_charges() {
        let omega = Domain::disc([0.0, 0.0], 1.0);
        let geom = LatticeGeometry::new(1.0 / 64.0).unwrap();
        let a = 0.3;
        let mu =
            SingularityConfig::new(vec![([a, 0.0], 1), ([-a, 0.0], -1)], &omega).unwrap();
        let fault = StackingFault {
            segments: vec![FaultSegment {
                y: 0.0,
                x1: -a,
                x2: a,
                left: EndpointKind::Dislocation,
                right: EndpointKind::Dislocation,
            }],
        };
        let opts = SolverOptions { restarts: 1, max_sweeps: 2000, ..Default::default() };
        let sigma = 0.28;
        let u = recovery_configuration(&omega, &geom, &mu, &fault, sigma, 1.0, &opts).unwrap();
        let doubled = double(&u);
        let m = vorticity_measure(&doubled, &omega, ScanLattice::Base).unwrap();
        assert_eq!(m.total_charge(), 0);
        // Net +1 near the positive point, net -1 near the negative one.
        let mut near_p = 0i64;
        let mut near_q = 0i64;
        for c in &m.charges {
            if ((c.x - a).powi(2) + c.y * c.y).sqrt() < sigma {
                near_p += c.charge;
            }
            if ((c.x + a).powi(2) + c.y * c.y).sqrt() < sigma {
                near_q += c.charge;
            }
        }
        assert_eq!(near_p, 1);
        assert_eq!(near_q, -1);
    }
}
