//! Stacking-fault geometry and the line-tension optimization.
//!
//! A stacking fault is a finite set of disjoint horizontal open segments
//! whose endpoints sit on dislocations or on the boundary. The line tension
//! of a configuration is the least total fault length that resolves the
//! tension of every dislocation (exactly one local horizontal ray per
//! dislocation). On each horizontal line feasible side assignments
//! alternate, leaving two candidate patterns; the optimizer picks the
//! cheaper one per line and an exhaustive search cross-checks it.

use crate::continuum::SingularityConfig;
use crate::error::{CoreError, Result};
use crate::lattice::{self, Direction, Domain, LatticeGeometry};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// What a fault segment endpoint is attached to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EndpointKind {
    Dislocation,
    Boundary,
}

/// Horizontal open segment `(x1, x2) x {y}` of a stacking fault.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaultSegment {
    pub y: f64,
    pub x1: f64,
    pub x2: f64,
    pub left: EndpointKind,
    pub right: EndpointKind,
}

impl FaultSegment {
    pub fn length(&self) -> f64 {
        self.x2 - self.x1
    }
}

/// Finite list of fault segments.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StackingFault {
    pub segments: Vec<FaultSegment>,
}

impl StackingFault {
    pub fn empty() -> Self {
        StackingFault { segments: Vec::new() }
    }

    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(|s| s.length()).sum()
    }
}

/// Result of the fault admissibility check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FaultDiagnostics {
    pub valid: bool,
    pub problems: Vec<String>,
}

const GEOM_TOL: f64 = 1e-9;

/// Whether `p` is a horizontal exit point: an endpoint of one of the
/// section intervals at its height.
fn on_boundary(omega: &Domain, p: [f64; 2]) -> bool {
    match omega.horizontal_section(p[1]) {
        Ok(sections) => sections
            .iter()
            .any(|(a, b)| (p[0] - a).abs() < 1e-7 || (p[0] - b).abs() < 1e-7),
        Err(_) => false,
    }
}

/// Check all stacking-fault invariants; failures are reported, not raised.
pub fn validate_fault(
    fault: &StackingFault,
    mu: &SingularityConfig,
    omega: &Domain,
) -> FaultDiagnostics {
    let mut problems = Vec::new();
    for (k, s) in fault.segments.iter().enumerate() {
        if !(s.x1 < s.x2) {
            problems.push(format!("segment {k} is degenerate or reversed"));
            continue;
        }
        // The open segment misses the dislocations.
        for (h, (x, _)) in mu.points().iter().enumerate() {
            if x[1] == s.y && x[0] > s.x1 + GEOM_TOL && x[0] < s.x2 - GEOM_TOL {
                problems.push(format!("segment {k} passes through dislocation {h}"));
            }
        }
        // Interior points lie in the domain.
        for t in [0.25, 0.5, 0.75] {
            let p = [s.x1 + t * (s.x2 - s.x1), s.y];
            if !omega.contains(p) {
                problems.push(format!("segment {k} leaves the domain"));
                break;
            }
        }
        // Endpoint classification.
        for (x, kind, name) in [(s.x1, s.left, "left"), (s.x2, s.right, "right")] {
            match kind {
                EndpointKind::Dislocation => {
                    let hit = mu
                        .points()
                        .iter()
                        .any(|(p, _)| p[1] == s.y && (p[0] - x).abs() < GEOM_TOL);
                    if !hit {
                        problems.push(format!(
                            "segment {k}: {name} endpoint marked dislocation but no \
                             dislocation sits there"
                        ));
                    }
                }
                EndpointKind::Boundary => {
                    if !on_boundary(omega, [x, s.y]) {
                        problems.push(format!(
                            "segment {k}: {name} endpoint marked boundary but is not \
                             on the boundary"
                        ));
                    }
                }
            }
        }
    }
    // Pairwise disjoint on each line.
    for (a, sa) in fault.segments.iter().enumerate() {
        for (b, sb) in fault.segments.iter().enumerate().take(a) {
            if sa.y == sb.y && sa.x1 < sb.x2 - GEOM_TOL && sb.x1 < sa.x2 - GEOM_TOL {
                problems.push(format!("segments {b} and {a} overlap"));
            }
        }
    }
    FaultDiagnostics { valid: problems.is_empty(), problems }
}

/// Local fault side at a dislocation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// Total length of `(a, b)` covered by fault segments on line `y`.
fn covered_length(fault: &StackingFault, y: f64, a: f64, b: f64) -> f64 {
    let mut pieces: Vec<(f64, f64)> = fault
        .segments
        .iter()
        .filter(|s| s.y == y)
        .map(|s| (s.x1.max(a), s.x2.min(b)))
        .filter(|(l, r)| r > l)
        .collect();
    pieces.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let mut total = 0.0;
    let mut cursor = a;
    for (l, r) in pieces {
        let l = l.max(cursor);
        if r > l {
            total += r - l;
            cursor = r;
        }
    }
    total
}

/// The side whose ray `S ∩ B_sigma(x_h)` covers, if the local structure is
/// exactly one full ray.
pub fn local_side(fault: &StackingFault, point: [f64; 2], sigma: f64) -> Option<Side> {
    let right = covered_length(fault, point[1], point[0], point[0] + sigma);
    let left = covered_length(fault, point[1], point[0] - sigma, point[0]);
    let full = |c: f64| c >= sigma - GEOM_TOL;
    let empty = |c: f64| c <= GEOM_TOL;
    if full(right) && empty(left) {
        Some(Side::Right)
    } else if full(left) && empty(right) {
        Some(Side::Left)
    } else {
        None
    }
}

/// Whether the fault resolves the tension of every dislocation at scale
/// sigma: near each `x_h` it coincides with exactly one of the two local
/// horizontal rays.
pub fn resolves_tension(
    fault: &StackingFault,
    mu: &SingularityConfig,
    omega: &Domain,
    sigma: f64,
) -> Result<bool> {
    if !mu.sigma_ok(omega, sigma) {
        return Err(CoreError::Geometry(format!(
            "sigma = {sigma} is too large: discs overlap or leave the domain"
        )));
    }
    Ok(mu
        .points()
        .iter()
        .all(|(x, _)| local_side(fault, *x, sigma).is_some()))
}

/// Dislocations grouped by horizontal line and section component.
struct LineGroup {
    y: f64,
    xs: Vec<f64>,
    comp: (f64, f64),
}

fn group_by_line(mu: &SingularityConfig, omega: &Domain) -> Result<Vec<LineGroup>> {
    let mut groups: Vec<LineGroup> = Vec::new();
    for (x, _) in mu.points() {
        if omega.boundary_distance(*x) < GEOM_TOL {
            return Err(CoreError::Geometry(format!(
                "dislocation at ({}, {}) sits on the boundary",
                x[0], x[1]
            )));
        }
        let sections = omega.horizontal_section(x[1])?;
        let comp = sections
            .into_iter()
            .find(|(a, b)| x[0] > *a && x[0] < *b)
            .ok_or_else(|| {
                CoreError::Geometry(format!(
                    "dislocation at ({}, {}) is outside every section",
                    x[0], x[1]
                ))
            })?;
        if let Some(g) = groups
            .iter_mut()
            .find(|g| g.y == x[1] && g.comp == comp)
        {
            g.xs.push(x[0]);
        } else {
            groups.push(LineGroup { y: x[1], xs: vec![x[0]], comp });
        }
    }
    for g in &mut groups {
        g.xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    }
    Ok(groups)
}

fn pattern_segments(g: &LineGroup, start_right: bool) -> Vec<FaultSegment> {
    let k = g.xs.len();
    let mut segs = Vec::new();
    let mut i = 0;
    if !start_right {
        // Leftmost dislocation connects to the boundary.
        segs.push(FaultSegment {
            y: g.y,
            x1: g.comp.0,
            x2: g.xs[0],
            left: EndpointKind::Boundary,
            right: EndpointKind::Dislocation,
        });
        i = 1;
    }
    while i + 1 < k {
        segs.push(FaultSegment {
            y: g.y,
            x1: g.xs[i],
            x2: g.xs[i + 1],
            left: EndpointKind::Dislocation,
            right: EndpointKind::Dislocation,
        });
        i += 2;
    }
    if i == k - 1 {
        // One unpaired dislocation remains: ray to the right boundary.
        segs.push(FaultSegment {
            y: g.y,
            x1: g.xs[k - 1],
            x2: g.comp.1,
            left: EndpointKind::Dislocation,
            right: EndpointKind::Boundary,
        });
    }
    segs
}

/// Minimal resolving fault via the per-line alternation structure.
///
/// On each line the feasible side assignments alternate, leaving exactly
/// two candidate patterns; the optimizer keeps the cheaper one (ties go to
/// the pattern pairing from the left).
pub fn line_tension(
    mu: &SingularityConfig,
    omega: &Domain,
) -> Result<(f64, StackingFault)> {
    let groups = group_by_line(mu, omega)?;
    let mut segments = Vec::new();
    let mut total = 0.0;
    for g in &groups {
        let a = pattern_segments(g, true);
        let b = pattern_segments(g, false);
        let la: f64 = a.iter().map(|s| s.length()).sum();
        let lb: f64 = b.iter().map(|s| s.length()).sum();
        if la <= lb {
            total += la;
            segments.extend(a);
        } else {
            total += lb;
            segments.extend(b);
        }
    }
    Ok((total, StackingFault { segments }))
}

/// Exhaustive oracle for the line tension: enumerate all side assignments
/// per line, construct the implied fault, reject assignments whose
/// construction gives some dislocation both local rays (or none), and
/// minimize the total length. Capped at 12 dislocations.
pub fn line_tension_bruteforce(mu: &SingularityConfig, omega: &Domain) -> Result<f64> {
    if mu.len() > 12 {
        return Err(CoreError::BadArgument(
            "brute-force line tension is capped at 12 dislocations".into(),
        ));
    }
    let groups = group_by_line(mu, omega)?;
    let mut total = 0.0;
    for g in &groups {
        let k = g.xs.len();
        let mut best = f64::INFINITY;
        for mask in 0..(1u32 << k) {
            let side = |i: usize| -> Side {
                if mask & (1 << i) != 0 {
                    Side::Right
                } else {
                    Side::Left
                }
            };
            // Construct the implied segments.
            let mut segs: Vec<(f64, f64)> = Vec::new();
            for i in 0..k {
                match side(i) {
                    Side::Right => {
                        let end = if i + 1 < k { g.xs[i + 1] } else { g.comp.1 };
                        segs.push((g.xs[i], end));
                    }
                    Side::Left => {
                        let start = if i == 0 { g.comp.0 } else { g.xs[i - 1] };
                        segs.push((start, g.xs[i]));
                    }
                }
            }
            segs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            segs.dedup();
            // Reject if a segment passes through a dislocation, if two
            // segments overlap, or if some dislocation gets both rays.
            let mut ok = true;
            for &(a, b) in &segs {
                for &x in &g.xs {
                    if x > a + GEOM_TOL && x < b - GEOM_TOL {
                        ok = false;
                    }
                }
            }
            for w in segs.windows(2) {
                if w[1].0 < w[0].1 - GEOM_TOL {
                    ok = false;
                }
            }
            if ok {
                for (i, &x) in g.xs.iter().enumerate() {
                    let right = segs.iter().any(|&(a, _)| (a - x).abs() < GEOM_TOL);
                    let left = segs.iter().any(|&(_, b)| (b - x).abs() < GEOM_TOL);
                    let want = side(i);
                    if !(right ^ left) || (want == Side::Right) != right {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                let len: f64 = segs.iter().map(|(a, b)| b - a).sum();
                best = best.min(len);
            }
        }
        if !best.is_finite() {
            return Err(CoreError::Geometry("no feasible side assignment".into()));
        }
        total += best;
    }
    Ok(total)
}

/// Two-coloring of a family of boundary-to-boundary horizontal chords:
/// the value flips across each chord, represented by the parity of the
/// chord heights below a point. On-chord points take the trace from below.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoColoring {
    heights: Vec<f64>,
}

impl TwoColoring {
    /// 0 or pi.
    pub fn value(&self, p: [f64; 2]) -> f64 {
        let below = self.heights.iter().filter(|h| **h < p[1]).count();
        if below % 2 == 1 {
            PI
        } else {
            0.0
        }
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }
}

/// Build the two-coloring of full boundary-to-boundary chords. Every chord
/// must span the whole horizontal section of the (simply connected) domain
/// at its height.
pub fn two_coloring(chords: &StackingFault, omega: &Domain) -> Result<TwoColoring> {
    let mut heights = Vec::with_capacity(chords.segments.len());
    for (k, s) in chords.segments.iter().enumerate() {
        let sections = omega.horizontal_section(s.y)?;
        if sections.len() != 1 {
            return Err(CoreError::Geometry(format!(
                "chord {k}: the section at height {} is not a single interval \
                 (domain not simply connected there)",
                s.y
            )));
        }
        let (a, b) = sections[0];
        if (s.x1 - a).abs() > 1e-7 || (s.x2 - b).abs() > 1e-7 {
            return Err(CoreError::Geometry(format!(
                "chord {k} does not span the full section [{a}, {b}]"
            )));
        }
        heights.push(s.y);
    }
    heights.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(TwoColoring { heights })
}

/// Number of vertical span-`span` bonds inside the domain whose half-open
/// segment `(i, i + span*eps*e2]` meets the fault.
pub fn fault_crossings(
    fault: &StackingFault,
    domain: &Domain,
    geom: &LatticeGeometry,
    span: i64,
) -> usize {
    let eps = geom.spacing();
    let mut count = 0;
    for (a, b) in lattice::bonds(domain, geom, Direction::E2, span, None) {
        let x = a.i1 as f64 * eps;
        let ylo = a.i2 as f64 * eps;
        let yhi = b.i2 as f64 * eps;
        let hit = fault
            .segments
            .iter()
            .any(|s| s.y > ylo && s.y <= yhi && x > s.x1 && x < s.x2);
        if hit {
            count += 1;
        }
    }
    count
}

/// The one-directional horizontal cuts through all dislocations: per line,
/// the union of right rays, split at the dislocations they pass through.
pub fn gamma_cuts(mu: &SingularityConfig, omega: &Domain) -> Result<StackingFault> {
    let groups = group_by_line(mu, omega)?;
    let mut segments = Vec::new();
    for g in &groups {
        for w in g.xs.windows(2) {
            segments.push(FaultSegment {
                y: g.y,
                x1: w[0],
                x2: w[1],
                left: EndpointKind::Dislocation,
                right: EndpointKind::Dislocation,
            });
        }
        segments.push(FaultSegment {
            y: g.y,
            x1: *g.xs.last().unwrap(),
            x2: g.comp.1,
            left: EndpointKind::Dislocation,
            right: EndpointKind::Boundary,
        });
    }
    Ok(StackingFault { segments })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn disc1() -> Domain {
        Domain::disc([0.0, 0.0], 1.0)
    }

    fn cfg(points: &[([f64; 2], i8)], omega: &Domain) -> SingularityConfig {
        SingularityConfig::new(points.to_vec(), omega).unwrap()
    }

    #[test]
    fn single_dislocation_forced_geometry() {
        let omega = disc1();
        let mu = cfg(&[([0.0, 0.0], 1)], &omega);
        let (l, fault) = line_tension(&mu, &omega).unwrap();
        assert!((l - 1.0).abs() < 1e-12);
        assert_eq!(fault.segments.len(), 1);
        let d = validate_fault(&fault, &mu, &omega);
        assert!(d.valid, "{:?}", d.problems);
        assert!(resolves_tension(&fault, &mu, &omega, 0.3).unwrap());
    }

    #[test]
    fn pair_prefers_connecting_segment() {
        let omega = disc1();
        let mu = cfg(&[([0.25, 0.0], 1), ([-0.25, 0.0], -1)], &omega);
        let (l, fault) = line_tension(&mu, &omega).unwrap();
        assert!((l - 0.5).abs() < 1e-12);
        assert_eq!(fault.segments.len(), 1);
        assert_eq!(fault.segments[0].left, EndpointKind::Dislocation);
        assert_eq!(fault.segments[0].right, EndpointKind::Dislocation);
        let bf = line_tension_bruteforce(&mu, &omega).unwrap();
        assert!((bf - l).abs() < 1e-12);
    }

    #[test]
    fn triple_ties_at_one() {
        let omega = disc1();
        let mu = cfg(&[([-0.5, 0.0], 1), ([0.0, 0.0], -1), ([0.5, 0.0], 1)], &omega);
        let (l, fault) = line_tension(&mu, &omega).unwrap();
        assert!((l - 1.0).abs() < 1e-12, "l = {l}");
        let bf = line_tension_bruteforce(&mu, &omega).unwrap();
        assert!((bf - 1.0).abs() < 1e-12);
        assert!(resolves_tension(&fault, &mu, &omega, 0.2).unwrap());
    }

    #[test]
    fn alternation_matches_bruteforce_on_random_configurations() {
        let omega = disc1();
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..200 {
            let lines = rng.gen_range(1..=3usize);
            let mut pts = Vec::new();
            for l in 0..lines {
                let y = -0.4 + 0.4 * l as f64;
                let n = rng.gen_range(1..=2usize);
                for _ in 0..n {
                    // Distinct x positions on the line.
                    loop {
                        let x = rng.gen::<f64>() * 1.2 - 0.6;
                        if pts
                            .iter()
                            .all(|(p, _): &([f64; 2], i8)| p[1] != y || (p[0] - x).abs() > 0.05)
                        {
                            pts.push(([x, y], if rng.gen::<bool>() { 1 } else { -1 }));
                            break;
                        }
                    }
                }
            }
            let mu = cfg(&pts, &omega);
            let (l, fault) = line_tension(&mu, &omega).unwrap();
            let bf = line_tension_bruteforce(&mu, &omega).unwrap();
            assert!((l - bf).abs() < 1e-12, "alternation {l} vs brute force {bf}");
            let d = validate_fault(&fault, &mu, &omega);
            assert!(d.valid, "{:?}", d.problems);
            // The optimal fault always resolves tension at a safe sigma.
            let sigma = mu.max_sigma(&omega, 0.5).min(0.02);
            assert!(resolves_tension(&fault, &mu, &omega, sigma).unwrap());
            // Upper bound: boundary-only alternating pattern.
            let groups_bound: f64 = {
                let mut t = 0.0;
                for (p, _) in mu.points() {
                    let (a, b) = omega.horizontal_section(p[1]).unwrap()[0];
                    t += (p[0] - a).min(b - p[0]);
                }
                t
            };
            assert!(l <= groups_bound + 1e-12);
        }
    }

    #[test]
    fn empty_configuration_has_zero_tension() {
        let omega = disc1();
        let mu = SingularityConfig::empty();
        let (l, fault) = line_tension(&mu, &omega).unwrap();
        assert_eq!(l, 0.0);
        assert!(fault.segments.is_empty());
        assert_eq!(line_tension_bruteforce(&mu, &omega).unwrap(), 0.0);
    }

    #[test]
    fn invalid_faults_are_reported() {
        let omega = disc1();
        let mu = cfg(&[([0.0, 0.0], 1)], &omega);
        // A segment through the dislocation interior.
        let bad = StackingFault {
            segments: vec![FaultSegment {
                y: 0.0,
                x1: -0.5,
                x2: 0.5,
                left: EndpointKind::Dislocation,
                right: EndpointKind::Dislocation,
            }],
        };
        let d = validate_fault(&bad, &mu, &omega);
        assert!(!d.valid);
        // Endpoint marked boundary but strictly inside.
        let bad = StackingFault {
            segments: vec![FaultSegment {
                y: 0.0,
                x1: 0.0,
                x2: 0.5,
                left: EndpointKind::Dislocation,
                right: EndpointKind::Boundary,
            }],
        };
        let d = validate_fault(&bad, &mu, &omega);
        assert!(!d.valid);
    }

    #[test]
    fn both_rays_do_not_resolve_tension() {
        let omega = disc1();
        let mu = cfg(&[([0.0, 0.0], 1)], &omega);
        let both = StackingFault {
            segments: vec![
                FaultSegment {
                    y: 0.0,
                    x1: -1.0,
                    x2: 0.0,
                    left: EndpointKind::Boundary,
                    right: EndpointKind::Dislocation,
                },
                FaultSegment {
                    y: 0.0,
                    x1: 0.0,
                    x2: 1.0,
                    left: EndpointKind::Dislocation,
                    right: EndpointKind::Boundary,
                },
            ],
        };
        assert!(!resolves_tension(&both, &mu, &omega, 0.3).unwrap());
        let none = StackingFault::empty();
        assert!(!resolves_tension(&none, &mu, &omega, 0.3).unwrap());
    }

    #[test]
    fn gamma_cuts_are_valid_for_any_configuration() {
        let omega = disc1();
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..50 {
            let n = rng.gen_range(1..=4usize);
            let mut pts: Vec<([f64; 2], i8)> = Vec::new();
            while pts.len() < n {
                let p = [rng.gen::<f64>() * 1.4 - 0.7, rng.gen::<f64>() * 1.4 - 0.7];
                if pts.iter().all(|(q, _)| (q[0] - p[0]).abs() > 0.03 || q[1] != p[1]) {
                    pts.push((p, 1));
                }
            }
            let mu = cfg(&pts, &omega);
            let cuts = gamma_cuts(&mu, &omega).unwrap();
            let d = validate_fault(&cuts, &mu, &omega);
            assert!(d.valid, "{:?}", d.problems);
            let sigma = mu.max_sigma(&omega, 0.5).min(0.01);
            assert!(resolves_tension(&cuts, &mu, &omega, sigma).unwrap());
        }
    }

    #[test]
    fn two_coloring_single_chord() {
        let omega = disc1();
        let chord = StackingFault {
            segments: vec![FaultSegment {
                y: 0.0,
                x1: -1.0,
                x2: 1.0,
                left: EndpointKind::Boundary,
                right: EndpointKind::Boundary,
            }],
        };
        let chi = two_coloring(&chord, &omega).unwrap();
        assert_eq!(chi.value([0.3, 0.5]), PI);
        assert_eq!(chi.value([0.3, -0.5]), 0.0);
        // On-chord value is the trace from below.
        assert_eq!(chi.value([0.3, 0.0]), 0.0);
    }

    #[test]
    fn two_coloring_two_chords_alternate() {
        let omega = Domain::rect([0.0, 0.0], [1.0, 1.0]);
        let chords = StackingFault {
            segments: vec![
                FaultSegment {
                    y: 0.25,
                    x1: 0.0,
                    x2: 1.0,
                    left: EndpointKind::Boundary,
                    right: EndpointKind::Boundary,
                },
                FaultSegment {
                    y: 0.75,
                    x1: 0.0,
                    x2: 1.0,
                    left: EndpointKind::Boundary,
                    right: EndpointKind::Boundary,
                },
            ],
        };
        let chi = two_coloring(&chords, &omega).unwrap();
        assert_eq!(chi.value([0.5, 0.1]), 0.0);
        assert_eq!(chi.value([0.5, 0.5]), PI);
        assert_eq!(chi.value([0.5, 0.9]), 0.0);
    }

    #[test]
    fn partial_chord_is_rejected() {
        let omega = disc1();
        let not_a_chord = StackingFault {
            segments: vec![FaultSegment {
                y: 0.0,
                x1: -0.5,
                x2: 1.0,
                left: EndpointKind::Boundary,
                right: EndpointKind::Boundary,
            }],
        };
        assert!(two_coloring(&not_a_chord, &omega).is_err());
    }

    #[test]
    fn coloring_flips_match_crossing_counts_on_columns() {
        let omega = Domain::rect([0.0, 0.0], [1.0, 1.0]);
        let chords = StackingFault {
            segments: vec![
                FaultSegment {
                    y: 0.3,
                    x1: 0.0,
                    x2: 1.0,
                    left: EndpointKind::Boundary,
                    right: EndpointKind::Boundary,
                },
                FaultSegment {
                    y: 0.62,
                    x1: 0.0,
                    x2: 1.0,
                    left: EndpointKind::Boundary,
                    right: EndpointKind::Boundary,
                },
            ],
        };
        let chi = two_coloring(&chords, &omega).unwrap();
        let geom = LatticeGeometry::new(1.0 / 16.0).unwrap();
        // Along each lattice column, sign flips happen exactly on bonds
        // crossing a chord.
        for (a, b) in lattice::bonds(&omega, &geom, Direction::E2, 1, None) {
            let pa = geom.position(a);
            let pb = geom.position(b);
            let flip = chi.value(pa) != chi.value(pb);
            let crossings = chords
                .segments
                .iter()
                .filter(|s| s.y > pa[1] && s.y <= pb[1])
                .count();
            assert_eq!(flip, crossings % 2 == 1);
        }
    }

    #[test]
    fn crossing_count_respects_length_bound() {
        let omega = disc1();
        let geom = LatticeGeometry::new(1.0 / 32.0).unwrap();
        let fault = StackingFault {
            segments: vec![FaultSegment {
                y: 0.1,
                x1: -0.4,
                x2: 0.35,
                left: EndpointKind::Boundary,
                right: EndpointKind::Boundary,
            }],
        };
        assert_eq!(fault_crossings(&StackingFault::empty(), &omega, &geom, 2), 0);
        let n = fault_crossings(&fault, &omega, &geom, 2);
        let len = fault.total_length();
        let eps = geom.spacing();
        assert!(n as f64 <= 2.0 * len / eps + 2.0, "n = {n}");
        assert!(n > 0);
    }

    #[test]
    fn scaled_crossing_cost_approaches_four_alpha_length() {
        let omega = disc1();
        let fault = StackingFault {
            segments: vec![FaultSegment {
                y: 0.05,
                x1: -0.6,
                x2: 0.2,
                left: EndpointKind::Boundary,
                right: EndpointKind::Boundary,
            }],
        };
        let alpha = 1.3;
        let len = fault.total_length();
        let mut prev_err = f64::INFINITY;
        for k in [16.0, 32.0, 64.0, 128.0] {
            let geom = LatticeGeometry::new(1.0 / k).unwrap();
            let n = fault_crossings(&fault, &omega, &geom, 2) as f64;
            let cost = 2.0 * alpha * geom.spacing() * n;
            let err = (cost - 4.0 * alpha * len).abs();
            assert!(err <= prev_err + 0.05, "trend broken at eps = 1/{k}");
            prev_err = err;
        }
        assert!(prev_err < 0.1 * 4.0 * alpha * len);
    }
}
