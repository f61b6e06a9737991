//! Continuum reference quantities for charge configurations.
//!
//! For a configuration `mu = sum_h d_h delta_{x_h}` with `d_h = ±1` this
//! module evaluates the Poisson potential `Phi_mu` (`Delta Phi = 2 pi mu`,
//! zero boundary data), its regular part, the renormalized energy
//!
//! ```text
//! W(mu) = -pi sum_{h != h'} d_h d_h' log|x_h - x_h'| - pi sum_h d_h R_mu(x_h)
//! ```
//!
//! and the canonical harmonic map, the S^1-valued field whose current is
//! `grad^perp Phi_mu / 2`. Discs use the analytic Green's function with
//! image charges; rectangles solve the harmonic correction by second-order
//! finite differences with a built-in Richardson check.

use crate::error::{CoreError, Result};
use crate::lattice::Domain;
use crate::vorticity::{ChargedPoint, VorticityMeasure};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A finite configuration of unit charges strictly inside a domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularityConfig {
    points: Vec<([f64; 2], i8)>,
}

impl SingularityConfig {
    pub fn new(points: Vec<([f64; 2], i8)>, omega: &Domain) -> Result<Self> {
        for (k, (x, d)) in points.iter().enumerate() {
            if *d != 1 && *d != -1 {
                return Err(CoreError::BadArgument(format!(
                    "charge {k} must be +1 or -1, got {d}"
                )));
            }
            if !omega.contains(*x) || omega.boundary_distance(*x) == 0.0 {
                return Err(CoreError::Geometry(format!(
                    "point {k} at ({}, {}) is not strictly inside the domain",
                    x[0], x[1]
                )));
            }
            for (j, (y, _)) in points.iter().enumerate().take(k) {
                if x == y {
                    return Err(CoreError::Geometry(format!("points {j} and {k} coincide")));
                }
            }
        }
        Ok(SingularityConfig { points })
    }

    pub fn empty() -> Self {
        SingularityConfig { points: Vec::new() }
    }

    pub fn points(&self) -> &[([f64; 2], i8)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn negated(&self) -> Self {
        SingularityConfig {
            points: self.points.iter().map(|(x, d)| (*x, -d)).collect(),
        }
    }

    pub fn to_measure(&self) -> VorticityMeasure {
        VorticityMeasure::new(
            self.points
                .iter()
                .map(|(x, d)| ChargedPoint { x: x[0], y: x[1], charge: *d as i64 })
                .collect(),
        )
    }

    /// Largest sigma satisfying the disjoint-disc condition, scaled by a
    /// safety factor in (0, 1].
    pub fn max_sigma(&self, omega: &Domain, safety: f64) -> f64 {
        let mut s = f64::INFINITY;
        for (k, (x, _)) in self.points.iter().enumerate() {
            s = s.min(omega.boundary_distance(*x));
            for (y, _) in self.points.iter().take(k) {
                let d = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
                s = s.min(d / 2.0);
            }
        }
        s * safety
    }

    /// Check the disc condition for a given sigma: the `B_sigma(x_h)` are
    /// pairwise disjoint and contained in the domain.
    pub fn sigma_ok(&self, omega: &Domain, sigma: f64) -> bool {
        sigma > 0.0 && sigma <= self.max_sigma(omega, 1.0)
    }
}

fn norm(v: [f64; 2]) -> f64 {
    (v[0] * v[0] + v[1] * v[1]).sqrt()
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

/// `grad arg(x - a)`: the perpendicular field `(x-a)^perp / |x-a|^2`.
fn grad_arg(x: [f64; 2], a: [f64; 2]) -> [f64; 2] {
    let d = sub(x, a);
    let r2 = d[0] * d[0] + d[1] * d[1];
    [-d[1] / r2, d[0] / r2]
}

fn grad_log(x: [f64; 2], a: [f64; 2]) -> [f64; 2] {
    let d = sub(x, a);
    let r2 = d[0] * d[0] + d[1] * d[1];
    [d[0] / r2, d[1] / r2]
}

/// Image point of `y` across the circle of radius `r` centred at `c`.
fn image_point(y: [f64; 2], c: [f64; 2], r: f64) -> [f64; 2] {
    let d = sub(y, c);
    let q = r * r / (d[0] * d[0] + d[1] * d[1]);
    [c[0] + q * d[0], c[1] + q * d[1]]
}

/// How `Phi_mu` is represented.
#[derive(Clone, Debug)]
enum PhiRepr {
    /// Analytic Green's function of a disc with image charges.
    Disc { center: [f64; 2], radius: f64 },
    /// Singular part plus a finite-difference harmonic correction.
    Rect(FdCorrection),
}

/// Potential of a charge configuration with zero boundary data.
#[derive(Clone, Debug)]
pub struct PhiMu {
    config: SingularityConfig,
    repr: PhiRepr,
}

impl PhiMu {
    /// Evaluate `Phi_mu` at a point away from the charges.
    pub fn eval(&self, x: [f64; 2]) -> f64 {
        let mut v = self.regular_part(x);
        for (p, d) in self.config.points() {
            v += *d as f64 * norm(sub(x, *p)).ln();
        }
        v
    }

    /// The regular part `R_mu(x) = Phi_mu(x) - sum_h d_h log|x - x_h|`,
    /// harmonic on the whole domain.
    pub fn regular_part(&self, x: [f64; 2]) -> f64 {
        match &self.repr {
            PhiRepr::Disc { center, radius } => {
                let mut v = 0.0;
                for (p, d) in self.config.points() {
                    let rho = norm(sub(*p, *center));
                    if rho == 0.0 {
                        v -= *d as f64 * radius.ln();
                    } else {
                        let star = image_point(*p, *center, *radius);
                        v -= *d as f64 * (norm(sub(x, star)) * rho / radius).ln();
                    }
                }
                v
            }
            PhiRepr::Rect(fd) => fd.eval(x),
        }
    }

    pub fn grad(&self, x: [f64; 2]) -> [f64; 2] {
        let mut g = self.grad_regular(x);
        for (p, d) in self.config.points() {
            let gl = grad_log(x, *p);
            g[0] += *d as f64 * gl[0];
            g[1] += *d as f64 * gl[1];
        }
        g
    }

    fn grad_regular(&self, x: [f64; 2]) -> [f64; 2] {
        match &self.repr {
            PhiRepr::Disc { center, radius } => {
                let mut g = [0.0, 0.0];
                for (p, d) in self.config.points() {
                    let rho = norm(sub(*p, *center));
                    if rho > 0.0 {
                        let star = image_point(*p, *center, *radius);
                        let gl = grad_log(x, star);
                        g[0] -= *d as f64 * gl[0];
                        g[1] -= *d as f64 * gl[1];
                    }
                }
                g
            }
            PhiRepr::Rect(fd) => fd.grad(x),
        }
    }

    /// Relative Richardson estimate of the finite-difference error
    /// (zero for the analytic disc path).
    pub fn fd_richardson_error(&self) -> f64 {
        match &self.repr {
            PhiRepr::Disc { .. } => 0.0,
            PhiRepr::Rect(fd) => fd.richardson_error,
        }
    }
}

/// Resolution of the finite-difference Poisson solve on rectangles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdSpec {
    /// Grid points per side (odd).
    pub n: usize,
    /// Also solve at roughly half resolution and record the difference.
    pub richardson: bool,
}

impl Default for FdSpec {
    fn default() -> Self {
        FdSpec { n: 513, richardson: true }
    }
}

/// Harmonic correction on a rectangle, on a uniform grid.
#[derive(Clone, Debug)]
struct FdCorrection {
    min: [f64; 2],
    max: [f64; 2],
    n1: usize,
    n2: usize,
    values: Vec<f64>,
    grad_x: Vec<f64>,
    grad_y: Vec<f64>,
    /// Conjugate of the correction, grid-integrated.
    conjugate: Vec<f64>,
    richardson_error: f64,
}

impl FdCorrection {
    fn solve(min: [f64; 2], max: [f64; 2], config: &SingularityConfig, n: usize) -> FdCorrection {
        let n1 = n;
        let n2 = n;
        let h1 = (max[0] - min[0]) / (n1 - 1) as f64;
        let h2 = (max[1] - min[1]) / (n2 - 1) as f64;
        let pos = |i: usize, j: usize| -> [f64; 2] {
            [min[0] + i as f64 * h1, min[1] + j as f64 * h2]
        };
        let g_bc = |x: [f64; 2]| -> f64 {
            let mut v = 0.0;
            for (p, d) in config.points() {
                v -= *d as f64 * norm(sub(x, *p)).ln();
            }
            v
        };

        let idx = |i: usize, j: usize| j * n1 + i;
        let mut values = vec![0.0; n1 * n2];
        for i in 0..n1 {
            values[idx(i, 0)] = g_bc(pos(i, 0));
            values[idx(i, n2 - 1)] = g_bc(pos(i, n2 - 1));
        }
        for j in 0..n2 {
            values[idx(0, j)] = g_bc(pos(0, j));
            values[idx(n1 - 1, j)] = g_bc(pos(n1 - 1, j));
        }

        // Conjugate-gradient solve of the 5-point Laplace system on the
        // interior, matrix free.
        let mi = n1 - 2;
        let mj = n2 - 2;
        let m = mi * mj;
        let c1 = 1.0 / (h1 * h1);
        let c2 = 1.0 / (h2 * h2);
        let diag = 2.0 * (c1 + c2);
        let uidx = |i: usize, j: usize| (j - 1) * mi + (i - 1);
        let apply = |u: &[f64], out: &mut [f64]| {
            for j in 1..=mj {
                for i in 1..=mi {
                    let k = uidx(i, j);
                    let mut v = diag * u[k];
                    if i > 1 {
                        v -= c1 * u[uidx(i - 1, j)];
                    }
                    if i < mi {
                        v -= c1 * u[uidx(i + 1, j)];
                    }
                    if j > 1 {
                        v -= c2 * u[uidx(i, j - 1)];
                    }
                    if j < mj {
                        v -= c2 * u[uidx(i, j + 1)];
                    }
                    out[k] = v;
                }
            }
        };
        let mut b = vec![0.0; m];
        for j in 1..=mj {
            for i in 1..=mi {
                let mut v = 0.0;
                if i == 1 {
                    v += c1 * values[idx(0, j)];
                }
                if i == mi {
                    v += c1 * values[idx(n1 - 1, j)];
                }
                if j == 1 {
                    v += c2 * values[idx(i, 0)];
                }
                if j == mj {
                    v += c2 * values[idx(i, n2 - 1)];
                }
                b[uidx(i, j)] = v;
            }
        }
        let mut u = vec![0.0; m];
        let mut r = b.clone();
        let mut p = r.clone();
        let mut ap = vec![0.0; m];
        let mut rs: f64 = r.iter().map(|v| v * v).sum();
        let b_norm = rs.sqrt().max(1e-300);
        let tol = 1e-11 * b_norm;
        for _ in 0..20 * n {
            if rs.sqrt() <= tol {
                break;
            }
            apply(&p, &mut ap);
            let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
            let alpha = rs / pap;
            for k in 0..m {
                u[k] += alpha * p[k];
                r[k] -= alpha * ap[k];
            }
            let rs_new: f64 = r.iter().map(|v| v * v).sum();
            let beta = rs_new / rs;
            rs = rs_new;
            for k in 0..m {
                p[k] = r[k] + beta * p[k];
            }
        }
        for j in 1..=mj {
            for i in 1..=mi {
                values[idx(i, j)] = u[uidx(i, j)];
            }
        }

        // Node gradients: central differences inside, one sided on edges.
        let mut grad_x = vec![0.0; n1 * n2];
        let mut grad_y = vec![0.0; n1 * n2];
        for j in 0..n2 {
            for i in 0..n1 {
                grad_x[idx(i, j)] = if i == 0 {
                    (values[idx(1, j)] - values[idx(0, j)]) / h1
                } else if i == n1 - 1 {
                    (values[idx(n1 - 1, j)] - values[idx(n1 - 2, j)]) / h1
                } else {
                    (values[idx(i + 1, j)] - values[idx(i - 1, j)]) / (2.0 * h1)
                };
                grad_y[idx(i, j)] = if j == 0 {
                    (values[idx(i, 1)] - values[idx(i, 0)]) / h2
                } else if j == n2 - 1 {
                    (values[idx(i, n2 - 1)] - values[idx(i, n2 - 2)]) / h2
                } else {
                    (values[idx(i, j + 1)] - values[idx(i, j - 1)]) / (2.0 * h2)
                };
            }
        }

        // Conjugate psi with grad psi = (-dR/dy, dR/dx), integrated along
        // the first column and then along rows.
        let mut conjugate = vec![0.0; n1 * n2];
        for j in 1..n2 {
            conjugate[idx(0, j)] = conjugate[idx(0, j - 1)]
                + 0.5 * h2 * (grad_x[idx(0, j - 1)] + grad_x[idx(0, j)]);
        }
        for j in 0..n2 {
            for i in 1..n1 {
                conjugate[idx(i, j)] = conjugate[idx(i - 1, j)]
                    - 0.5 * h1 * (grad_y[idx(i - 1, j)] + grad_y[idx(i, j)]);
            }
        }

        FdCorrection {
            min,
            max,
            n1,
            n2,
            values,
            grad_x,
            grad_y,
            conjugate,
            richardson_error: 0.0,
        }
    }

    fn bilinear(&self, data: &[f64], x: [f64; 2]) -> f64 {
        let h1 = (self.max[0] - self.min[0]) / (self.n1 - 1) as f64;
        let h2 = (self.max[1] - self.min[1]) / (self.n2 - 1) as f64;
        let fx = ((x[0] - self.min[0]) / h1).clamp(0.0, (self.n1 - 1) as f64);
        let fy = ((x[1] - self.min[1]) / h2).clamp(0.0, (self.n2 - 1) as f64);
        let i = (fx.floor() as usize).min(self.n1 - 2);
        let j = (fy.floor() as usize).min(self.n2 - 2);
        let tx = fx - i as f64;
        let ty = fy - j as f64;
        let idx = |i: usize, j: usize| j * self.n1 + i;
        let v00 = data[idx(i, j)];
        let v10 = data[idx(i + 1, j)];
        let v01 = data[idx(i, j + 1)];
        let v11 = data[idx(i + 1, j + 1)];
        v00 * (1.0 - tx) * (1.0 - ty) + v10 * tx * (1.0 - ty) + v01 * (1.0 - tx) * ty
            + v11 * tx * ty
    }

    fn eval(&self, x: [f64; 2]) -> f64 {
        self.bilinear(&self.values, x)
    }

    fn grad(&self, x: [f64; 2]) -> [f64; 2] {
        [self.bilinear(&self.grad_x, x), self.bilinear(&self.grad_y, x)]
    }

    fn conjugate_at(&self, x: [f64; 2]) -> f64 {
        self.bilinear(&self.conjugate, x)
    }
}

/// Solve the Poisson problem defining `Phi_mu` on the given domain.
pub fn phi_mu(config: &SingularityConfig, omega: &Domain, fd: FdSpec) -> Result<PhiMu> {
    match omega {
        Domain::Disc { center, radius } => Ok(PhiMu {
            config: config.clone(),
            repr: PhiRepr::Disc { center: *center, radius: *radius },
        }),
        Domain::Rect { min, max } => {
            let mut sol = FdCorrection::solve(*min, *max, config, fd.n);
            if fd.richardson {
                let coarse = FdCorrection::solve(*min, *max, config, fd.n / 2 + 1);
                // Compare at the coarse nodes, skipping the boundary.
                let mut err: f64 = 0.0;
                let mut scale: f64 = 0.0;
                let h1 = (max[0] - min[0]) / (coarse.n1 - 1) as f64;
                let h2 = (max[1] - min[1]) / (coarse.n2 - 1) as f64;
                for j in 1..coarse.n2 - 1 {
                    for i in 1..coarse.n1 - 1 {
                        let x = [min[0] + i as f64 * h1, min[1] + j as f64 * h2];
                        let d = (sol.eval(x) - coarse.eval(x)).abs();
                        err = err.max(d);
                        scale = scale.max(sol.eval(x).abs());
                    }
                }
                sol.richardson_error = err / scale.max(1e-12);
            }
            Ok(PhiMu { config: config.clone(), repr: PhiRepr::Rect(sol) })
        }
        _ => Err(CoreError::Geometry(
            "Phi_mu is implemented for discs and rectangles".into(),
        )),
    }
}

/// Renormalized energy of a configuration, with per-point regular parts.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RenormalizedEnergy {
    pub w: f64,
    pub regular_parts: Vec<f64>,
    pub method: RenormalizationMethod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RenormalizationMethod {
    AnalyticDisc,
    FiniteDifference,
}

/// `W(mu, Omega) = -pi sum_{h != h'} d_h d_h' log|x_h - x_h'|
///                 - pi sum_h d_h R_mu(x_h)`.
pub fn renormalized_energy(
    config: &SingularityConfig,
    omega: &Domain,
    fd: FdSpec,
) -> Result<RenormalizedEnergy> {
    let phi = phi_mu(config, omega, fd)?;
    let pts = config.points();
    let mut w = 0.0;
    for (h, (x, d)) in pts.iter().enumerate() {
        for (h2, (y, e)) in pts.iter().enumerate() {
            if h != h2 {
                w -= PI * (*d as f64) * (*e as f64) * norm(sub(*x, *y)).ln();
            }
        }
    }
    let mut regular_parts = Vec::with_capacity(pts.len());
    for (x, d) in pts {
        let r = phi.regular_part(*x);
        regular_parts.push(r);
        w -= PI * (*d as f64) * r;
    }
    let method = match &phi.repr {
        PhiRepr::Disc { .. } => RenormalizationMethod::AnalyticDisc,
        PhiRepr::Rect(_) => RenormalizationMethod::FiniteDifference,
    };
    Ok(RenormalizedEnergy { w, regular_parts, method })
}

/// Continuum target for the punctured minimization: `M pi |log sigma| + W`.
pub fn m_sigma_reference(
    config: &SingularityConfig,
    omega: &Domain,
    sigma: f64,
    fd: FdSpec,
) -> Result<f64> {
    if !config.sigma_ok(omega, sigma) {
        return Err(CoreError::Geometry(format!(
            "sigma = {sigma} violates the disjoint-disc condition"
        )));
    }
    let w = renormalized_energy(config, omega, fd)?.w;
    Ok(config.len() as f64 * PI * sigma.ln().abs() + w)
}

/// A continuum S^1-valued field given through an angle function and its
/// gradient; `|grad v| = |grad angle|` pointwise.
pub trait AngleField {
    fn angle(&self, x: [f64; 2]) -> f64;
    fn grad(&self, x: [f64; 2]) -> [f64; 2];
}

/// The canonical harmonic map of a configuration: the harmonic conjugate of
/// `Phi_mu`, winding `d_h` around each `x_h`. The additive constant (a
/// global rotation) follows the principal branches of the summands.
#[derive(Clone, Debug)]
pub struct HarmonicAngle {
    config: SingularityConfig,
    repr: PhiRepr,
}

impl AngleField for HarmonicAngle {
    fn angle(&self, x: [f64; 2]) -> f64 {
        let mut a = 0.0;
        for (p, d) in self.config.points() {
            let r = sub(x, *p);
            a += *d as f64 * r[1].atan2(r[0]);
        }
        match &self.repr {
            PhiRepr::Disc { center, radius } => {
                for (p, d) in self.config.points() {
                    if norm(sub(*p, *center)) > 0.0 {
                        let star = image_point(*p, *center, *radius);
                        let r = sub(x, star);
                        a -= *d as f64 * r[1].atan2(r[0]);
                    }
                }
                a
            }
            PhiRepr::Rect(fd) => a + fd.conjugate_at(x),
        }
    }

    fn grad(&self, x: [f64; 2]) -> [f64; 2] {
        let mut g = [0.0, 0.0];
        for (p, d) in self.config.points() {
            let ga = grad_arg(x, *p);
            g[0] += *d as f64 * ga[0];
            g[1] += *d as f64 * ga[1];
        }
        match &self.repr {
            PhiRepr::Disc { center, radius } => {
                for (p, d) in self.config.points() {
                    if norm(sub(*p, *center)) > 0.0 {
                        let star = image_point(*p, *center, *radius);
                        let ga = grad_arg(x, star);
                        g[0] -= *d as f64 * ga[0];
                        g[1] -= *d as f64 * ga[1];
                    }
                }
            }
            PhiRepr::Rect(fd) => {
                let gr = fd.grad(x);
                g[0] -= gr[1];
                g[1] += gr[0];
            }
        }
        g
    }
}

/// Canonical harmonic map associated to a configuration on a disc or
/// rectangle.
pub fn canonical_harmonic_map(
    config: &SingularityConfig,
    omega: &Domain,
    fd: FdSpec,
) -> Result<HarmonicAngle> {
    let phi = phi_mu(config, omega, fd)?;
    Ok(HarmonicAngle { config: phi.config, repr: phi.repr })
}

/// Quadrature resolution for the Dirichlet integrals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    /// Angular samples in the polar grids around singularities.
    pub n_theta: usize,
    /// Radial samples per annulus (log spaced).
    pub n_radial: usize,
    /// Cells per side (or rings) of the outer-region grid.
    pub n_outer: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { n_theta: 1024, n_radial: 320, n_outer: 512 }
    }
}

/// Half Dirichlet energy of an angle field over the annulus
/// `A_{r1,r2}(center)` by polar midpoint quadrature (log-spaced radii).
pub fn annulus_energy(
    field: &impl AngleField,
    center: [f64; 2],
    r1: f64,
    r2: f64,
    spec: &QuadratureSpec,
) -> f64 {
    assert!(r2 > r1 && r1 > 0.0);
    let n_r = spec.n_radial.max(8);
    let n_t = spec.n_theta.max(16);
    let dlog = (r2 / r1).ln() / n_r as f64;
    let dth = 2.0 * PI / n_t as f64;
    let mut total = 0.0;
    for k in 0..n_r {
        let r = r1 * ((k as f64 + 0.5) * dlog).exp();
        // Midpoint in log r: cell measure r dr dtheta = r^2 dlog dtheta.
        let w = r * r * dlog * dth;
        for t in 0..n_t {
            let th = (t as f64 + 0.5) * dth;
            let x = [center[0] + r * th.cos(), center[1] + r * th.sin()];
            let g = field.grad(x);
            total += 0.5 * (g[0] * g[0] + g[1] * g[1]) * w;
        }
    }
    total
}

/// Half Dirichlet energy over the domain minus the discs `B_{rho_h}(x_h)`.
fn outer_energy(
    field: &impl AngleField,
    omega: &Domain,
    holes: &[([f64; 2], f64)],
    spec: &QuadratureSpec,
) -> Result<f64> {
    let density = |x: [f64; 2]| -> f64 {
        let g = field.grad(x);
        0.5 * (g[0] * g[0] + g[1] * g[1])
    };
    let keep = |x: [f64; 2]| -> bool {
        holes
            .iter()
            .all(|(c, rho)| (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2) > rho * rho)
    };
    // Fraction of a cell centred at x that survives removing the holes;
    // straddling cells are subsampled.
    let cell_weight = |x: [f64; 2], dx: f64, dy: f64| -> f64 {
        let rad = 0.5 * (dx * dx + dy * dy).sqrt();
        let mut straddles = false;
        for (c, rho) in holes {
            let d = ((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2)).sqrt();
            if (d - rho).abs() <= rad {
                straddles = true;
                break;
            }
        }
        if !straddles {
            return if keep(x) { 1.0 } else { 0.0 };
        }
        let s = 8;
        let mut inside = 0;
        for a in 0..s {
            for b in 0..s {
                let p = [
                    x[0] + dx * ((a as f64 + 0.5) / s as f64 - 0.5),
                    x[1] + dy * ((b as f64 + 0.5) / s as f64 - 0.5),
                ];
                if keep(p) {
                    inside += 1;
                }
            }
        }
        inside as f64 / (s * s) as f64
    };
    match omega {
        Domain::Disc { center, radius } => {
            let n_r = spec.n_outer;
            let n_t = spec.n_theta;
            let dr = radius / n_r as f64;
            let dth = 2.0 * PI / n_t as f64;
            let mut total = 0.0;
            for k in 0..n_r {
                let r = (k as f64 + 0.5) * dr;
                let w = r * dr * dth;
                let arc = r * dth;
                for t in 0..n_t {
                    let th = (t as f64 + 0.5) * dth;
                    let x = [center[0] + r * th.cos(), center[1] + r * th.sin()];
                    let frac = cell_weight(x, dr, arc);
                    if frac > 0.0 {
                        total += density(x) * w * frac;
                    }
                }
            }
            Ok(total)
        }
        Domain::Rect { min, max } => {
            let n = spec.n_outer;
            let dx = (max[0] - min[0]) / n as f64;
            let dy = (max[1] - min[1]) / n as f64;
            let mut total = 0.0;
            for j in 0..n {
                for i in 0..n {
                    let x = [
                        min[0] + (i as f64 + 0.5) * dx,
                        min[1] + (j as f64 + 0.5) * dy,
                    ];
                    let frac = cell_weight(x, dx, dy);
                    if frac > 0.0 {
                        total += density(x) * dx * dy * frac;
                    }
                }
            }
            Ok(total)
        }
        _ => Err(CoreError::Geometry(
            "quadrature domains are discs and rectangles".into(),
        )),
    }
}

/// `1/2 int_{Omega^sigma(mu)} |grad v|^2 - M pi |log sigma|` for each sigma
/// of the ladder. As sigma decreases the values are non-decreasing and
/// approach the renormalized energy of the field.
pub fn renormalized_energy_of_field(
    field: &impl AngleField,
    config: &SingularityConfig,
    omega: &Domain,
    sigmas: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<f64>> {
    let pts = config.points();
    let m = pts.len() as f64;
    // Per-singularity gluing radii, independent of sigma.
    let mut rho = Vec::with_capacity(pts.len());
    for (h, (x, _)) in pts.iter().enumerate() {
        let mut r = omega.boundary_distance(*x);
        for (h2, (y, _)) in pts.iter().enumerate() {
            if h != h2 {
                r = r.min(norm(sub(*x, *y)) / 2.0);
            }
        }
        rho.push(0.9 * r);
        let _ = h;
    }
    for &s in sigmas {
        if !config.sigma_ok(omega, s) {
            return Err(CoreError::Geometry(format!(
                "sigma = {s} violates the disjoint-disc condition"
            )));
        }
        if let Some(h) = rho.iter().position(|r| s >= *r) {
            return Err(CoreError::Geometry(format!(
                "sigma = {s} reaches the gluing radius of singularity {h}"
            )));
        }
    }
    let holes: Vec<([f64; 2], f64)> =
        pts.iter().zip(&rho).map(|((x, _), r)| (*x, *r)).collect();
    let outer = outer_energy(field, omega, &holes, spec)?;
    let mut out = Vec::with_capacity(sigmas.len());
    for &s in sigmas {
        let mut total = outer;
        for ((x, _), r) in pts.iter().zip(&rho) {
            total += annulus_energy(field, *x, s, *r, spec);
        }
        out.push(total - m * PI * s.ln().abs());
    }
    Ok(out)
}
