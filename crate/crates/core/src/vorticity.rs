//! Discrete derivative calculus and topological charge detection.
//!
//! The elastic increment reduces nearest-neighbour differences modulo the
//! integers with an orientation convention that makes plaquette circulations
//! exactly quantized in `{-1, 0, 1}`. Circulations and winding numbers are
//! accumulated through their integer parts, so quantization holds bit for
//! bit rather than up to rounding.

use crate::error::{CoreError, Result};
use crate::fields::DisplacementField;
use crate::lattice::{self, Cell, Domain, Site, SublatticeTag};
use serde::{Deserialize, Serialize};

/// Projection of a real number onto the nearest integer, ties resolved
/// downward: `P(t) = ceil(t - 1/2)`, so `P(z + 1/2) = z`.
pub fn project_int(t: f64) -> i64 {
    (t - 0.5).ceil() as i64
}

/// Distance from `t` to the nearest integer, consistent with
/// [`project_int`] bit for bit.
pub fn dist_int(t: f64) -> f64 {
    (t - project_int(t) as f64).abs()
}

fn step_of(_u: &DisplacementField, i: Site, j: Site) -> Result<()> {
    let d1 = (j.i1 - i.i1).abs();
    let d2 = (j.i2 - i.i2).abs();
    if d1 + d2 == 0 || (d1 != 0 && d2 != 0) {
        return Err(CoreError::NotNeighbours(i, j));
    }
    Ok(())
}

/// Elastic part of the discrete derivative `du(i,j) = u(j) - u(i)` along a
/// single axis-aligned step:
///
/// * `du - P(du)` when `i <= j` componentwise,
/// * `du + P(du(j,i))` when `j <= i`.
///
/// Antisymmetric in `(i,j)`, with `|value| = dist(du, Z)`.
pub fn elastic_increment(u: &DisplacementField, i: Site, j: Site) -> Result<f64> {
    step_of(u, i, j)?;
    let ui = u.try_get(i)?;
    let uj = u.try_get(j)?;
    Ok(elastic_from_values(ui, uj, i.leq(j)))
}

fn elastic_from_values(ui: f64, uj: f64, forward: bool) -> f64 {
    if forward {
        let d = uj - ui;
        d - project_int(d) as f64
    } else {
        let d = uj - ui;
        d + project_int(ui - uj) as f64
    }
}

/// Integer part subtracted by the elastic increment; summing these along a
/// closed loop gives the (negated) winding exactly.
fn elastic_integer_part(ui: f64, uj: f64, forward: bool) -> i64 {
    if forward {
        -project_int(uj - ui)
    } else {
        project_int(ui - uj)
    }
}

/// Discrete circulation of `du` around a cell, counterclockwise. Exactly
/// quantized in `{-1, 0, 1}`.
pub fn plaquette_circulation(u: &DisplacementField, cell: Cell) -> Result<i64> {
    let [a, b, c, d] = cell.corners();
    let va = u.try_get(a)?;
    let vb = u.try_get(b)?;
    let vc = u.try_get(c)?;
    let vd = u.try_get(d)?;
    // The smooth parts telescope to zero around the loop; the circulation
    // is the sum of the integer parts.
    let w = elastic_integer_part(va, vb, true)
        + elastic_integer_part(vb, vc, true)
        + elastic_integer_part(vc, vd, false)
        + elastic_integer_part(vd, va, false);
    debug_assert!((-1..=1).contains(&w), "plaquette charge {w} out of range");
    Ok(w)
}

/// Finite sum of integer Dirac charges at distinct planar points.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VorticityMeasure {
    pub charges: Vec<ChargedPoint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargedPoint {
    pub x: f64,
    pub y: f64,
    pub charge: i64,
}

impl VorticityMeasure {
    pub fn new(charges: Vec<ChargedPoint>) -> Self {
        VorticityMeasure { charges }
    }

    pub fn total_charge(&self) -> i64 {
        self.charges.iter().map(|c| c.charge).sum()
    }

    pub fn total_variation(&self) -> i64 {
        self.charges.iter().map(|c| c.charge.abs()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.charges.is_empty()
    }

    /// Difference measure with coincident points cancelled.
    pub fn sub(&self, other: &VorticityMeasure) -> VorticityMeasure {
        let mut pts: Vec<ChargedPoint> = self.charges.clone();
        for c in &other.charges {
            pts.push(ChargedPoint { x: c.x, y: c.y, charge: -c.charge });
        }
        reduce_coincident(pts)
    }
}

fn reduce_coincident(pts: Vec<ChargedPoint>) -> VorticityMeasure {
    let mut out: Vec<ChargedPoint> = Vec::new();
    for p in pts {
        if let Some(q) = out.iter_mut().find(|q| q.x == p.x && q.y == p.y) {
            q.charge += p.charge;
        } else {
            out.push(p);
        }
    }
    out.retain(|p| p.charge != 0);
    VorticityMeasure { charges: out }
}

/// Lattice on which a vorticity scan runs: the fine lattice or one of the
/// four double-spaced sublattice complexes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanLattice {
    Base,
    Sub(SublatticeTag),
}

/// Vorticity measure of a displacement: one Dirac charge at the barycenter
/// of every cell (of the chosen lattice, restricted to the domain) with
/// nonzero circulation.
pub fn vorticity_measure(
    u: &DisplacementField,
    domain: &Domain,
    lattice_sel: ScanLattice,
) -> Result<VorticityMeasure> {
    let geom = *u.geom();
    let cells = match lattice_sel {
        ScanLattice::Base => lattice::cells_with_span(domain, &geom, 1, None),
        ScanLattice::Sub(tag) => lattice::cells_with_span(domain, &geom, 2, Some(tag)),
    };
    let mut charges = Vec::new();
    for cell in cells {
        let w = plaquette_circulation(u, cell)?;
        if w != 0 {
            let b = cell.barycenter(&geom);
            charges.push(ChargedPoint { x: b[0], y: b[1], charge: w });
        }
    }
    Ok(VorticityMeasure { charges })
}

/// Winding number of `u` along a closed lattice loop: the sum of elastic
/// increments over consecutive steps, accumulated exactly as an integer.
pub fn winding_number(u: &DisplacementField, loop_sites: &[Site]) -> Result<i64> {
    if loop_sites.len() < 4 {
        return Err(CoreError::BrokenLoop);
    }
    let n = loop_sites.len();
    let mut total = 0i64;
    for k in 0..n {
        let i = loop_sites[k];
        let j = loop_sites[(k + 1) % n];
        let d1 = (j.i1 - i.i1).abs();
        let d2 = (j.i2 - i.i2).abs();
        if d1 + d2 != 1 {
            return Err(CoreError::BrokenLoop);
        }
        let ui = u.try_get(i)?;
        let uj = u.try_get(j)?;
        total += elastic_integer_part(ui, uj, i.leq(j));
    }
    Ok(total)
}

/// Counterclockwise rectangular lattice loop along the boundary of the
/// cell block with anchors in `[lo, hi]` (inclusive anchor range).
pub fn block_boundary_loop(lo: Site, hi: Site) -> Vec<Site> {
    let mut out = Vec::new();
    for i1 in lo.i1..=hi.i1 + 1 {
        out.push(Site::new(i1, lo.i2));
    }
    for i2 in lo.i2 + 1..=hi.i2 + 1 {
        out.push(Site::new(hi.i1 + 1, i2));
    }
    for i1 in (lo.i1..=hi.i1).rev() {
        out.push(Site::new(i1, hi.i2 + 1));
    }
    for i2 in (lo.i2 + 1..=hi.i2).rev() {
        out.push(Site::new(lo.i1, i2));
    }
    out
}

/// Flat distance between two finite integer Dirac sums on a domain.
///
/// Evaluates the matching-with-annihilation dual of the flat norm of
/// `mu - nu`: each unit of charge is either transported to a unit of the
/// opposite sign at cost `min(|x - y|, 2)` or annihilated at cost
/// `min(1, dist(x, boundary))`. Exact (subset dynamic programming) up to 12
/// units of charge; greedy beyond.
pub fn flat_distance(mu: &VorticityMeasure, nu: &VorticityMeasure, omega: &Domain) -> f64 {
    let diff = mu.sub(nu);
    let mut plus: Vec<[f64; 2]> = Vec::new();
    let mut minus: Vec<[f64; 2]> = Vec::new();
    for c in &diff.charges {
        let reps = c.charge.unsigned_abs() as usize;
        for _ in 0..reps {
            if c.charge > 0 {
                plus.push([c.x, c.y]);
            } else {
                minus.push([c.x, c.y]);
            }
        }
    }
    if plus.len() + minus.len() == 0 {
        return 0.0;
    }
    let kill = |p: [f64; 2]| omega.boundary_distance(p).min(1.0);
    let pair = |p: [f64; 2], q: [f64; 2]| {
        let d = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
        d.min(2.0)
    };
    if plus.len() + minus.len() <= 12 {
        // dp over (next + index, subset of matched - charges).
        let nm = minus.len();
        let full = 1usize << nm;
        let mut dp = vec![f64::INFINITY; full];
        dp[0] = 0.0;
        for p in plus.iter() {
            let mut next = vec![f64::INFINITY; full];
            for (mask, &cost) in dp.iter().enumerate() {
                if !cost.is_finite() {
                    continue;
                }
                // Kill the + charge.
                let c = cost + kill(*p);
                if c < next[mask] {
                    next[mask] = c;
                }
                // Or match it with an unused - charge.
                for (im, q) in minus.iter().enumerate() {
                    if mask & (1 << im) != 0 {
                        continue;
                    }
                    let c = cost + pair(*p, *q);
                    let m = mask | (1 << im);
                    if c < next[m] {
                        next[m] = c;
                    }
                }
            }
            dp = next;
        }
        let mut best = f64::INFINITY;
        for (mask, &cost) in dp.iter().enumerate() {
            if !cost.is_finite() {
                continue;
            }
            let mut total = cost;
            for (im, q) in minus.iter().enumerate() {
                if mask & (1 << im) == 0 {
                    total += kill(*q);
                }
            }
            best = best.min(total);
        }
        best
    } else {
        // Greedy: repeatedly take the cheapest available action.
        let mut plus = plus;
        let mut minus = minus;
        let mut total = 0.0;
        while !plus.is_empty() || !minus.is_empty() {
            let mut best = f64::INFINITY;
            let mut action = (usize::MAX, usize::MAX);
            for (i, p) in plus.iter().enumerate() {
                let k = kill(*p);
                if k < best {
                    best = k;
                    action = (i, usize::MAX);
                }
                for (j, q) in minus.iter().enumerate() {
                    let c = pair(*p, *q);
                    if c < best {
                        best = c;
                        action = (i, j);
                    }
                }
            }
            for (j, q) in minus.iter().enumerate() {
                let k = kill(*q);
                if k < best {
                    best = k;
                    action = (usize::MAX, j);
                }
            }
            total += best;
            match action {
                (i, j) if i != usize::MAX && j != usize::MAX => {
                    plus.swap_remove(i);
                    minus.swap_remove(j);
                }
                (i, _) if i != usize::MAX => {
                    plus.swap_remove(i);
                }
                (_, j) => {
                    minus.swap_remove(j);
                }
            }
        }
        total
    }
}

/// Dipole-free representative of `u` on `U`: along each horizontal run of
/// bonds inside `U`, horizontal jumps are removed by accumulating elastic
/// increments from the leftmost site. The result is integer-equivalent to
/// `u`, has `du = d^e u` on every horizontal bond in `U`, and carries the
/// same vorticity measure.
pub fn dipole_free_representative(u: &DisplacementField, domain: &Domain) -> DisplacementField {
    let geom = *u.geom();
    let mut out = u.clone();
    let (lo, hi) = domain.index_range(&geom);
    for i2 in lo.i2..=hi.i2 {
        let mut run_start: Option<Site> = None;
        let mut prev_val = 0.0;
        for i1 in lo.i1..=hi.i1 + 1 {
            let a = Site::new(i1 - 1, i2);
            let b = Site::new(i1, i2);
            let bond_in = u.grid.defined(a)
                && u.grid.defined(b)
                && domain.contains_segment(geom.position(a), geom.position(b));
            if bond_in {
                if run_start.is_none() {
                    run_start = Some(a);
                    prev_val = u.get(a).unwrap();
                    out.set(a, prev_val);
                }
                let inc = elastic_from_values(u.get(a).unwrap(), u.get(b).unwrap(), true);
                prev_val += inc;
                out.set(b, prev_val);
            } else {
                run_start = None;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::DisplacementField;
    use crate::lattice::LatticeGeometry;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn geom(eps: f64) -> LatticeGeometry {
        LatticeGeometry::new(eps).unwrap()
    }

    #[test]
    fn project_int_convention() {
        assert_eq!(project_int(0.3), 0);
        assert_eq!(project_int(0.5), 0); // minimal argmin at ties
        assert_eq!(project_int(-0.5), -1);
        assert_eq!(project_int(1.5), 1);
        assert_eq!(project_int(0.7), 1);
    }

    #[test]
    fn project_int_commutes_with_integer_shifts() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let t = rng.gen::<f64>() * 4.0 - 2.0;
            for z in -3..=3i64 {
                assert_eq!(project_int(t + z as f64), project_int(t) + z);
            }
        }
    }

    #[test]
    fn elastic_increment_cases() {
        let d = Domain::rect([0.0, 0.0], [1.0, 0.0]);
        let g = geom(0.5);
        let sites = lattice::sites(&d, &g, None);
        let mut u = DisplacementField::from_sites(g, &sites, |_| 0.0);
        let i = Site::new(0, 0);
        let j = Site::new(1, 0);
        u.set(j, 0.3);
        assert!((elastic_increment(&u, i, j).unwrap() - 0.3).abs() < 1e-15);
        u.set(j, 0.7);
        assert!((elastic_increment(&u, i, j).unwrap() + 0.3).abs() < 1e-15);
    }

    #[test]
    fn elastic_increment_is_antisymmetric() {
        let d = Domain::rect([0.0, 0.0], [2.0, 2.0]);
        let g = geom(0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let u = DisplacementField::over_bounding_box(g, &d, |_| rng.gen::<f64>() * 4.0 - 2.0);
        for (a, b) in lattice::bonds(&d, &g, lattice::Direction::E1, 1, None) {
            let f = elastic_increment(&u, a, b).unwrap();
            let r = elastic_increment(&u, b, a).unwrap();
            assert_eq!(f, -r);
            assert!((f.abs() - dist_int(u.get(b).unwrap() - u.get(a).unwrap())).abs() < 1e-15);
        }
    }

    #[test]
    fn quarter_turn_plaquette_has_unit_charge() {
        let g = geom(1.0);
        let sites = vec![
            Site::new(0, 0),
            Site::new(1, 0),
            Site::new(1, 1),
            Site::new(0, 1),
        ];
        let vals = [0.0, 0.25, 0.5, 0.75];
        let mut k = 0;
        let u = DisplacementField::from_sites(g, &sites, |_| {
            let v = vals[k];
            k += 1;
            v
        });
        let c = plaquette_circulation(&u, Cell::fine(Site::new(0, 0))).unwrap();
        assert_eq!(c, 1);
    }

    #[test]
    fn constant_field_has_zero_charge() {
        let g = geom(1.0);
        let d = Domain::rect([0.0, 0.0], [3.0, 3.0]);
        let u = DisplacementField::over_bounding_box(g, &d, |_| 0.42);
        for cell in lattice::cells(&d, &g) {
            assert_eq!(plaquette_circulation(&u, cell).unwrap(), 0);
        }
    }

    #[test]
    fn circulation_matches_float_sum_oracle_and_is_quantized() {
        let g = geom(1.0);
        let d = Domain::rect([0.0, 0.0], [15.0, 15.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = DisplacementField::over_bounding_box(g, &d, |_| rng.gen::<f64>() * 6.0 - 3.0);
        for cell in lattice::cells(&d, &g) {
            let w = plaquette_circulation(&u, cell).unwrap();
            assert!((-1..=1).contains(&w));
            // Independent oracle: sum the four elastic increments as floats.
            let [a, b, c, dd] = cell.corners();
            let s = elastic_increment(&u, a, b).unwrap()
                + elastic_increment(&u, b, c).unwrap()
                + elastic_increment(&u, c, dd).unwrap()
                + elastic_increment(&u, dd, a).unwrap();
            assert!((s - w as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn integer_shift_leaves_all_outputs_unchanged() {
        let g = geom(1.0);
        let d = Domain::rect([0.0, 0.0], [8.0, 8.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let vals: Vec<f64> = (0..200).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let mut k = 0;
        let u = DisplacementField::over_bounding_box(g, &d, |_| {
            let v = vals[k % vals.len()];
            k += 1;
            v
        });
        let mut k = 0;
        let mut rng2 = ChaCha8Rng::seed_from_u64(99);
        let shifted = DisplacementField::over_bounding_box(g, &d, |_| {
            let v = vals[k % vals.len()] + rng2.gen_range(-3..=3i64) as f64;
            k += 1;
            v
        });
        let mu = vorticity_measure(&u, &d, ScanLattice::Base).unwrap();
        let mv = vorticity_measure(&shifted, &d, ScanLattice::Base).unwrap();
        assert_eq!(mu, mv);
    }

    #[test]
    fn block_charge_equals_boundary_winding() {
        let g = geom(1.0);
        let d = Domain::rect([0.0, 0.0], [10.0, 10.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = DisplacementField::over_bounding_box(g, &d, |_| rng.gen::<f64>() * 4.0 - 2.0);
        for _ in 0..50 {
            let a1 = rng.gen_range(0..7i64);
            let a2 = rng.gen_range(0..7i64);
            let b1 = rng.gen_range(a1..8i64);
            let b2 = rng.gen_range(a2..8i64);
            let lo = Site::new(a1, a2);
            let hi = Site::new(b1, b2);
            let mut total = 0;
            for i2 in a2..=b2 {
                for i1 in a1..=b1 {
                    total += plaquette_circulation(&u, Cell::fine(Site::new(i1, i2))).unwrap();
                }
            }
            let w = winding_number(&u, &block_boundary_loop(lo, hi)).unwrap();
            assert_eq!(total, w);
        }
    }

    #[test]
    fn reversed_loop_negates_winding() {
        let g = geom(1.0);
        let d = Domain::rect([0.0, 0.0], [4.0, 4.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let u = DisplacementField::over_bounding_box(g, &d, |_| rng.gen::<f64>());
        let fw = block_boundary_loop(Site::new(0, 0), Site::new(3, 3));
        let mut bw = fw.clone();
        bw.reverse();
        assert_eq!(
            winding_number(&u, &fw).unwrap(),
            -winding_number(&u, &bw).unwrap()
        );
    }

    #[test]
    fn flat_distance_simple_values() {
        let b10 = Domain::disc([0.0, 0.0], 10.0);
        let one = |x: f64, y: f64| VorticityMeasure::new(vec![ChargedPoint { x, y, charge: 1 }]);
        let mu = one(0.0, 0.0);
        assert_eq!(flat_distance(&mu, &mu, &b10), 0.0);
        let nu = one(0.5, 0.0);
        assert!((flat_distance(&mu, &nu, &b10) - 0.5).abs() < 1e-12);
        let empty = VorticityMeasure::default();
        let b1 = Domain::disc([0.0, 0.0], 1.0);
        assert!((flat_distance(&mu, &empty, &b1) - 1.0).abs() < 1e-12);
        let bh = Domain::disc([0.0, 0.0], 0.5);
        assert!((flat_distance(&mu, &empty, &bh) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn flat_distance_is_a_metric_on_small_random_configurations() {
        let omega = Domain::disc([0.0, 0.0], 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let rand_measure = |rng: &mut ChaCha8Rng| {
            let n = rng.gen_range(0..4usize);
            VorticityMeasure::new(
                (0..n)
                    .map(|_| ChargedPoint {
                        x: rng.gen::<f64>() * 2.0 - 1.0,
                        y: rng.gen::<f64>() * 2.0 - 1.0,
                        charge: if rng.gen::<bool>() { 1 } else { -1 },
                    })
                    .collect(),
            )
        };
        for _ in 0..60 {
            let a = rand_measure(&mut rng);
            let b = rand_measure(&mut rng);
            let c = rand_measure(&mut rng);
            let dab = flat_distance(&a, &b, &omega);
            let dba = flat_distance(&b, &a, &omega);
            assert!((dab - dba).abs() < 1e-9, "symmetry");
            let dac = flat_distance(&a, &c, &omega);
            let dcb = flat_distance(&c, &b, &omega);
            assert!(dab <= dac + dcb + 1e-9, "triangle inequality");
            assert!(flat_distance(&a, &a, &omega).abs() < 1e-12);
        }
    }

    #[test]
    fn dipole_free_representative_removes_horizontal_jumps() {
        let g = geom(1.0);
        let d = Domain::rect([0.0, 0.0], [6.0, 2.0]);
        // A full integer jump in one row.
        let u = DisplacementField::over_bounding_box(g, &d, |s| {
            if s.i2 == 1 && s.i1 >= 3 {
                1.0 + 0.05 * s.i1 as f64
            } else {
                0.05 * s.i1 as f64
            }
        });
        let t = dipole_free_representative(&u, &d);
        for (a, b) in lattice::bonds(&d, &g, lattice::Direction::E1, 1, None) {
            let du = t.get(b).unwrap() - t.get(a).unwrap();
            let de = elastic_increment(&u, a, b).unwrap();
            assert!((du - de).abs() < 1e-12);
        }
        // Integer equivalence.
        for (s, v) in t.grid.iter() {
            let w = u.get(s).unwrap();
            let z = v - w;
            assert!((z - z.round()).abs() < 1e-12);
        }
    }

    #[test]
    fn dipole_free_representative_preserves_vorticity() {
        let g = geom(1.0);
        let d = Domain::disc([0.05, 0.05], 8.0);
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let u = DisplacementField::over_bounding_box(g, &d, |_| rng.gen::<f64>() * 3.0 - 1.5);
        let t = dipole_free_representative(&u, &d);
        let mu = vorticity_measure(&u, &d, ScanLattice::Base).unwrap();
        let mt = vorticity_measure(&t, &d, ScanLattice::Base).unwrap();
        assert_eq!(mu, mt);
    }
}
