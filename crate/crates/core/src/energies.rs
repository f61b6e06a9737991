//! Interaction potentials and the discrete energies built from them.
//!
//! All energies are sums over bonds whose closed segment lies in the given
//! Borel region; no fractional boundary weights. Bond sweeps run in a fixed
//! row-major order, so results are bitwise reproducible.

use crate::error::Result;
use crate::fields::{chord_distance, DisplacementField, PlanarField, SpinField};
use crate::lattice::{self, Direction, Domain, SublatticeTag};
use crate::vorticity::dist_int;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Parameters of the partial-edge and weak-membrane energies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialParams {
    /// Stacking-fault weight of the next-to-nearest vertical interactions.
    pub alpha: f64,
    /// Weak-membrane threshold in the horizontal direction.
    pub tau1: f64,
    /// Weak-membrane threshold in the vertical direction.
    pub tau2: f64,
}

impl PotentialParams {
    pub fn new(alpha: f64) -> Self {
        PotentialParams { alpha, tau1: 1.0, tau2: 1.0 }
    }
}

/// The three pairwise interaction densities.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PotentialKind {
    /// Purely elastic: `2 pi^2 t^2`.
    F0,
    /// 1-periodic: `2 pi^2 dist^2(t, Z)`.
    F1,
    /// 1/2-periodic: `2 pi^2 dist^2(t, Z/2) = f1(2t) / 4`.
    FHalf,
}

pub fn potential(kind: PotentialKind, t: f64) -> f64 {
    match kind {
        PotentialKind::F0 => 2.0 * PI * PI * t * t,
        PotentialKind::F1 => {
            let d = dist_int(t);
            2.0 * PI * PI * d * d
        }
        PotentialKind::FHalf => 0.25 * potential(PotentialKind::F1, 2.0 * t),
    }
}

fn sum_bonds(
    u: &DisplacementField,
    domain: &Domain,
    dir: Direction,
    span: i64,
    tag: Option<SublatticeTag>,
    kind: PotentialKind,
) -> Result<f64> {
    let mut total = 0.0;
    for (a, b) in lattice::bonds(domain, u.geom(), dir, span, tag) {
        let d = u.try_get(b)? - u.try_get(a)?;
        total += potential(kind, d);
    }
    Ok(total)
}

/// Edge dislocation energy: elastic horizontal bonds, 1-periodic vertical
/// bonds.
pub fn energy_edge(u: &DisplacementField, domain: &Domain) -> Result<f64> {
    Ok(sum_bonds(u, domain, Direction::E1, 1, None, PotentialKind::F0)?
        + sum_bonds(u, domain, Direction::E2, 1, None, PotentialKind::F1)?)
}

/// Screw dislocation energy: 1-periodic bonds in both directions.
pub fn energy_screw(u: &DisplacementField, domain: &Domain) -> Result<f64> {
    Ok(sum_bonds(u, domain, Direction::E1, 1, None, PotentialKind::F1)?
        + sum_bonds(u, domain, Direction::E2, 1, None, PotentialKind::F1)?)
}

/// Per-term decomposition of the partial-edge energy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    /// Elastic horizontal nearest-neighbour part.
    pub horizontal: f64,
    /// Half-periodic vertical nearest-neighbour part.
    pub vertical_nn: f64,
    /// `alpha / pi^2 * eps`-weighted vertical next-to-nearest part.
    pub vertical_nnn: f64,
    pub total: f64,
}

/// Partial edge dislocation energy with its horizontal / vertical split.
pub fn energy_pedge(
    u: &DisplacementField,
    domain: &Domain,
    params: &PotentialParams,
) -> Result<EnergyBreakdown> {
    let eps = u.geom().spacing();
    let horizontal = sum_bonds(u, domain, Direction::E1, 1, None, PotentialKind::F0)?;
    let vertical_nn = sum_bonds(u, domain, Direction::E2, 1, None, PotentialKind::FHalf)?;
    let nnn_raw = sum_bonds(u, domain, Direction::E2, 2, None, PotentialKind::F1)?;
    let vertical_nnn = params.alpha / (PI * PI) * eps * nnn_raw;
    Ok(EnergyBreakdown {
        horizontal,
        vertical_nn,
        vertical_nnn,
        total: horizontal + vertical_nn + vertical_nnn,
    })
}

/// XY model energy of a spin field: half the sum of squared chord
/// differences over nearest-neighbour bonds.
pub fn energy_xy(v: &SpinField, domain: &Domain) -> Result<f64> {
    let mut total = 0.0;
    for dir in [Direction::E1, Direction::E2] {
        for (a, b) in lattice::bonds(domain, v.geom(), dir, 1, None) {
            let d = chord_distance(v.try_angle(a)?, v.try_angle(b)?);
            total += 0.5 * d * d;
        }
    }
    Ok(total)
}

/// Weak-membrane energy of a planar-vector field: truncated quadratic bond
/// costs with thresholds `tau_k * spacing` per direction. `span == 2` with a
/// sublattice tag gives the double-spaced variant (threshold scale `2 eps`).
pub fn energy_wm(
    w: &PlanarField,
    domain: &Domain,
    tau1: f64,
    tau2: f64,
    span: i64,
    tag: Option<SublatticeTag>,
) -> Result<f64> {
    let eps = w.geom.spacing() * span as f64;
    let mut total = 0.0;
    for (dir, tau) in [(Direction::E1, tau1), (Direction::E2, tau2)] {
        for (a, b) in lattice::bonds(domain, &w.geom, dir, span, tag) {
            let va = w.try_get(a)?;
            let vb = w.try_get(b)?;
            let d2 = (vb[0] - va[0]).powi(2) + (vb[1] - va[1]).powi(2);
            total += (0.5 * d2).min(tau * eps);
        }
    }
    Ok(total)
}

/// Edge energy of the restriction of a displacement to one of the four
/// shifted sublattices, evaluated with `2 eps` bonds of the fine lattice.
pub fn sublattice_energy_edge(
    u: &DisplacementField,
    domain: &Domain,
    tag: SublatticeTag,
) -> Result<f64> {
    Ok(sum_bonds(u, domain, Direction::E1, 2, Some(tag), PotentialKind::F0)?
        + sum_bonds(u, domain, Direction::E2, 2, Some(tag), PotentialKind::F1)?)
}

/// Screw energy on a shifted sublattice.
pub fn sublattice_energy_screw(
    u: &DisplacementField,
    domain: &Domain,
    tag: SublatticeTag,
) -> Result<f64> {
    Ok(sum_bonds(u, domain, Direction::E1, 2, Some(tag), PotentialKind::F1)?
        + sum_bonds(u, domain, Direction::E2, 2, Some(tag), PotentialKind::F1)?)
}

/// XY energy of a spin field on a shifted sublattice.
pub fn sublattice_energy_xy(
    v: &SpinField,
    domain: &Domain,
    tag: SublatticeTag,
) -> Result<f64> {
    let mut total = 0.0;
    for dir in [Direction::E1, Direction::E2] {
        for (a, b) in lattice::bonds(domain, v.geom(), dir, 2, Some(tag)) {
            let d = chord_distance(v.try_angle(a)?, v.try_angle(b)?);
            total += 0.5 * d * d;
        }
    }
    Ok(total)
}

/// Weak-membrane energy of a planar-vector field on a shifted sublattice
/// (threshold scale `2 eps`).
pub fn sublattice_energy_wm(
    w: &PlanarField,
    domain: &Domain,
    tau1: f64,
    tau2: f64,
    tag: SublatticeTag,
) -> Result<f64> {
    energy_wm(w, domain, tau1, tau2, 2, Some(tag))
}

/// Outcome of the cross-energy consistency checks for one field.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// `F_pedge = F_edge(2u)/4 + (alpha/pi^2) eps * sum f1(nnn)` holds to 1e-10.
    pub identity_ok: bool,
    pub identity_error: f64,
    /// `4 F_pedge >= F_edge(2u) >= F_screw(2u) >= XY(exp(4 pi i u))` with
    /// slack >= -1e-9.
    pub chain_ok: bool,
    pub chain_min_slack: f64,
    /// `F_pedge >= (1/16) * sum_j F_edge_{2eps,s_j}(2u)`.
    pub sublattice_ok: bool,
    pub sublattice_slack: f64,
    pub f_pedge: f64,
    pub f_edge_doubled: f64,
    pub f_screw_doubled: f64,
    pub f_xy_squared: f64,
}

impl ComparisonReport {
    pub fn all_ok(&self) -> bool {
        self.identity_ok && self.chain_ok && self.sublattice_ok
    }
}

/// Check the exact identity relating the partial-edge and edge energies,
/// the comparison chain down to the XY model, and the sublattice
/// decomposition bound, for one displacement on one region.
///
/// Failures are reported in the struct, never raised.
pub fn verify_comparisons(
    u: &DisplacementField,
    domain: &Domain,
    params: &PotentialParams,
) -> Result<ComparisonReport> {
    let eps = u.geom().spacing();
    let doubled = crate::fields::double(u);
    let pedge = energy_pedge(u, domain, params)?;
    let edge2 = energy_edge(&doubled, domain)?;
    let screw2 = energy_screw(&doubled, domain)?;
    let v = crate::fields::exp_field(u, crate::fields::LiftFactor::FourPi);
    let xy = energy_xy(&v, domain)?;

    let nnn_raw = sum_bonds(u, domain, Direction::E2, 2, None, PotentialKind::F1)?;
    let identity_rhs = 0.25 * edge2 + params.alpha / (PI * PI) * eps * nnn_raw;
    let identity_error = (pedge.total - identity_rhs).abs();
    let scale = 1.0 + pedge.total.abs();
    let identity_ok = identity_error <= 1e-10 * scale;

    let s1 = 4.0 * pedge.total - edge2;
    let s2 = edge2 - screw2;
    let s3 = screw2 - xy;
    let chain_min_slack = s1.min(s2).min(s3);
    let chain_ok = chain_min_slack >= -1e-9 * scale;

    let mut sub_sum = 0.0;
    for tag in SublatticeTag::SHIFTS {
        sub_sum += sublattice_energy_edge(&doubled, domain, tag)?;
    }
    let sublattice_slack = pedge.total - sub_sum / 16.0;
    let sublattice_ok = sublattice_slack >= -1e-9 * scale;

    Ok(ComparisonReport {
        identity_ok,
        identity_error,
        chain_ok,
        chain_min_slack,
        sublattice_ok,
        sublattice_slack,
        f_pedge: pedge.total,
        f_edge_doubled: edge2,
        f_screw_doubled: screw2,
        f_xy_squared: xy,
    })
}
