//! Displacement and spin fields on the lattice.
//!
//! Fields are dense row-major arrays over an integer bounding box with a
//! validity mask, so bond sweeps are cache friendly and site identity stays
//! exact. Spin fields store angles in `[0, 2pi)`; the unit-vector form is
//! derived on demand.

use crate::error::{CoreError, Result};
use crate::lattice::{self, Cell, Domain, LatticeGeometry, Site, SublatticeTag};
use std::f64::consts::TAU;

/// Dense scalar field over an integer box, with a validity mask.
#[derive(Clone, Debug)]
pub struct ScalarGrid {
    geom: LatticeGeometry,
    origin: Site,
    nx: i64,
    ny: i64,
    data: Vec<f64>,
    mask: Vec<bool>,
}

impl ScalarGrid {
    pub fn new(geom: LatticeGeometry, origin: Site, nx: i64, ny: i64) -> Self {
        let n = (nx * ny) as usize;
        ScalarGrid { geom, origin, nx, ny, data: vec![0.0; n], mask: vec![false; n] }
    }

    /// Field defined by `f` on a given site set.
    pub fn from_sites(
        geom: LatticeGeometry,
        sites: &[Site],
        mut f: impl FnMut(Site) -> f64,
    ) -> Self {
        let (lo1, lo2, hi1, hi2) = bounding_indices(sites);
        let mut g = ScalarGrid::new(geom, Site::new(lo1, lo2), hi1 - lo1 + 1, hi2 - lo2 + 1);
        for &s in sites {
            g.set(s, f(s));
        }
        g
    }

    /// Field defined on every lattice site of the domain's bounding box.
    pub fn over_bounding_box(
        geom: LatticeGeometry,
        domain: &Domain,
        mut f: impl FnMut(Site) -> f64,
    ) -> Self {
        let (lo, hi) = domain.index_range(&geom);
        let mut g =
            ScalarGrid::new(geom, lo, hi.i1 - lo.i1 + 1, hi.i2 - lo.i2 + 1);
        for i2 in lo.i2..=hi.i2 {
            for i1 in lo.i1..=hi.i1 {
                let s = Site::new(i1, i2);
                g.set(s, f(s));
            }
        }
        g
    }

    fn index(&self, s: Site) -> Option<usize> {
        let d1 = s.i1 - self.origin.i1;
        let d2 = s.i2 - self.origin.i2;
        if d1 < 0 || d2 < 0 || d1 >= self.nx || d2 >= self.ny {
            return None;
        }
        Some((d2 * self.nx + d1) as usize)
    }

    pub fn geom(&self) -> &LatticeGeometry {
        &self.geom
    }

    pub fn get(&self, s: Site) -> Option<f64> {
        let k = self.index(s)?;
        if self.mask[k] {
            Some(self.data[k])
        } else {
            None
        }
    }

    pub fn try_get(&self, s: Site) -> Result<f64> {
        self.get(s).ok_or(CoreError::MissingValue(s))
    }

    pub fn set(&mut self, s: Site, v: f64) {
        match self.index(s) {
            Some(k) => {
                self.data[k] = v;
                self.mask[k] = true;
            }
            None => panic!("site ({},{}) outside field storage", s.i1, s.i2),
        }
    }

    pub fn defined(&self, s: Site) -> bool {
        self.index(s).map(|k| self.mask[k]).unwrap_or(false)
    }

    /// Iterator over defined sites and their values.
    pub fn iter(&self) -> impl Iterator<Item = (Site, f64)> + '_ {
        (0..self.ny).flat_map(move |d2| {
            (0..self.nx).filter_map(move |d1| {
                let k = (d2 * self.nx + d1) as usize;
                if self.mask[k] {
                    Some((self.origin.offset(d1, d2), self.data[k]))
                } else {
                    None
                }
            })
        })
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> ScalarGrid {
        let mut out = self.clone();
        for k in 0..out.data.len() {
            if out.mask[k] {
                out.data[k] = f(out.data[k]);
            }
        }
        out
    }
}

fn bounding_indices(sites: &[Site]) -> (i64, i64, i64, i64) {
    assert!(!sites.is_empty(), "cannot build a field over an empty site set");
    let mut lo1 = i64::MAX;
    let mut lo2 = i64::MAX;
    let mut hi1 = i64::MIN;
    let mut hi2 = i64::MIN;
    for s in sites {
        lo1 = lo1.min(s.i1);
        lo2 = lo2.min(s.i2);
        hi1 = hi1.max(s.i1);
        hi2 = hi2.max(s.i2);
    }
    (lo1, lo2, hi1, hi2)
}

/// Scaled horizontal displacement `u` on the lattice.
#[derive(Clone, Debug)]
pub struct DisplacementField {
    pub grid: ScalarGrid,
}

/// Spin field stored as angles in `[0, 2pi)`; the spin at a site is
/// `exp(i * angle)`.
#[derive(Clone, Debug)]
pub struct SpinField {
    pub grid: ScalarGrid,
}

/// Planar-vector field on the lattice (used by the weak-membrane energy).
#[derive(Clone, Debug)]
pub struct PlanarField {
    pub geom: LatticeGeometry,
    grid_x: ScalarGrid,
    grid_y: ScalarGrid,
}

/// Normalize an angle to `[0, 2pi)`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(TAU);
    if r >= TAU {
        r = 0.0;
    }
    r
}

impl DisplacementField {
    pub fn from_sites(
        geom: LatticeGeometry,
        sites: &[Site],
        f: impl FnMut(Site) -> f64,
    ) -> Self {
        DisplacementField { grid: ScalarGrid::from_sites(geom, sites, f) }
    }

    pub fn over_bounding_box(
        geom: LatticeGeometry,
        domain: &Domain,
        f: impl FnMut(Site) -> f64,
    ) -> Self {
        DisplacementField { grid: ScalarGrid::over_bounding_box(geom, domain, f) }
    }

    pub fn geom(&self) -> &LatticeGeometry {
        &self.grid.geom
    }

    pub fn get(&self, s: Site) -> Option<f64> {
        self.grid.get(s)
    }

    pub fn try_get(&self, s: Site) -> Result<f64> {
        self.grid.try_get(s)
    }

    pub fn set(&mut self, s: Site, v: f64) {
        self.grid.set(s, v)
    }
}

impl SpinField {
    pub fn geom(&self) -> &LatticeGeometry {
        &self.grid.geom
    }

    pub fn angle(&self, s: Site) -> Option<f64> {
        self.grid.get(s)
    }

    pub fn try_angle(&self, s: Site) -> Result<f64> {
        self.grid.try_get(s)
    }

    pub fn vector(&self, s: Site) -> Option<[f64; 2]> {
        self.angle(s).map(|a| [a.cos(), a.sin()])
    }

    pub fn to_planar(&self) -> PlanarField {
        PlanarField {
            geom: *self.geom(),
            grid_x: self.grid.map_values(f64::cos),
            grid_y: self.grid.map_values(f64::sin),
        }
    }
}

impl PlanarField {
    pub fn from_fn(
        geom: LatticeGeometry,
        sites: &[Site],
        mut f: impl FnMut(Site) -> [f64; 2],
    ) -> Self {
        let mut vals = Vec::with_capacity(sites.len());
        for &s in sites {
            vals.push(f(s));
        }
        let mut k = 0;
        let grid_x = ScalarGrid::from_sites(geom, sites, |_| {
            let v = vals[k][0];
            k += 1;
            v
        });
        let mut k = 0;
        let grid_y = ScalarGrid::from_sites(geom, sites, |_| {
            let v = vals[k][1];
            k += 1;
            v
        });
        PlanarField { geom, grid_x, grid_y }
    }

    pub fn get(&self, s: Site) -> Option<[f64; 2]> {
        Some([self.grid_x.get(s)?, self.grid_y.get(s)?])
    }

    pub fn try_get(&self, s: Site) -> Result<[f64; 2]> {
        Ok([self.grid_x.try_get(s)?, self.grid_y.try_get(s)?])
    }
}

/// Lifting factor for [`exp_field`]: `v = exp(i * factor * u)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftFactor {
    /// `2 pi u`: the angular lifting of the displacement itself.
    TwoPi,
    /// `4 pi u`: realizes the complex square `w^2 = exp(4 pi i u)`.
    FourPi,
}

impl LiftFactor {
    pub fn value(self) -> f64 {
        match self {
            LiftFactor::TwoPi => TAU,
            LiftFactor::FourPi => 2.0 * TAU,
        }
    }
}

/// Complex exponential of a displacement: `v(i) = exp(i * factor * u(i))`.
pub fn exp_field(u: &DisplacementField, factor: LiftFactor) -> SpinField {
    let f = factor.value();
    SpinField { grid: u.grid.map_values(|t| wrap_angle(f * t)) }
}

/// Pointwise doubled displacement `2u`.
pub fn double(u: &DisplacementField) -> DisplacementField {
    DisplacementField { grid: u.grid.map_values(|t| 2.0 * t) }
}

/// Principal-branch angular lift of a spin field: `u = angle / (2 pi)`,
/// with values in `[0, 1)`. Other branches are obtained by adding integers.
pub fn angular_lift(v: &SpinField) -> DisplacementField {
    DisplacementField { grid: v.grid.map_values(|a| a / TAU) }
}

/// Restriction of a scalar grid to one of the four double-spaced
/// sublattices. The result lives on the `2 eps` lattice: the site
/// `eps*s_j + 2*eps*z` of the fine lattice becomes index `z`.
fn restrict_grid(grid: &ScalarGrid, tag: SublatticeTag) -> ScalarGrid {
    let (s1, s2) = tag
        .shift()
        .expect("restriction needs one of the four shifted sublattices");
    let geom2 = grid.geom.doubled();
    let lo1 = div_floor(grid.origin.i1 - s1, 2);
    let lo2 = div_floor(grid.origin.i2 - s2, 2);
    let hi1 = div_floor(grid.origin.i1 + grid.nx - 1 - s1, 2);
    let hi2 = div_floor(grid.origin.i2 + grid.ny - 1 - s2, 2);
    let mut out =
        ScalarGrid::new(geom2, Site::new(lo1, lo2), (hi1 - lo1 + 1).max(1), (hi2 - lo2 + 1).max(1));
    for z2 in lo2..=hi2 {
        for z1 in lo1..=hi1 {
            let fine = Site::new(2 * z1 + s1, 2 * z2 + s2);
            if let Some(v) = grid.get(fine) {
                out.set(Site::new(z1, z2), v);
            }
        }
    }
    out
}

fn div_floor(a: i64, b: i64) -> i64 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

/// Sublattice restriction of a displacement field (doubled spacing).
pub fn restrict_sublattice(u: &DisplacementField, tag: SublatticeTag) -> DisplacementField {
    DisplacementField { grid: restrict_grid(&u.grid, tag) }
}

/// Sublattice restriction of a spin field (doubled spacing).
pub fn restrict_spin_sublattice(v: &SpinField, tag: SublatticeTag) -> SpinField {
    SpinField { grid: restrict_grid(&v.grid, tag) }
}

/// Geodesic distance on the unit circle between the spins with the given
/// angles; equals `2 asin(|a - b| / 2)` with `|a - b|` the chord length.
pub fn geodesic_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Chord distance between the unit vectors with the given angles.
pub fn chord_distance(a: f64, b: f64) -> f64 {
    2.0 * ((a - b) / 2.0).sin().abs()
}

/// Piecewise-affine interpolant of a spin field (as a planar-vector field)
/// on the triangulation that splits each cell along its main diagonal.
pub struct AffineInterpolant<'a> {
    spin: &'a SpinField,
}

impl<'a> AffineInterpolant<'a> {
    /// Requires every corner of every cell of the domain to carry a value.
    pub fn new(spin: &'a SpinField, domain: &Domain) -> Result<Self> {
        for cell in lattice::cells(domain, spin.geom()) {
            for c in cell.corners() {
                spin.try_angle(c)?;
            }
        }
        Ok(AffineInterpolant { spin })
    }

    fn corner_vectors(&self, cell: Cell) -> Result<[[f64; 2]; 4]> {
        let [a, b, c, d] = cell.corners();
        Ok([
            self.vec(a)?,
            self.vec(b)?,
            self.vec(c)?,
            self.vec(d)?,
        ])
    }

    fn vec(&self, s: Site) -> Result<[f64; 2]> {
        let a = self.spin.try_angle(s)?;
        Ok([a.cos(), a.sin()])
    }

    /// Value of the interpolant at a point inside the given cell.
    pub fn evaluate_in_cell(&self, cell: Cell, p: [f64; 2]) -> Result<[f64; 2]> {
        let eps = self.spin.geom().spacing() * cell.span as f64;
        let a = self.spin.geom().position(cell.anchor);
        let x = (p[0] - a[0]) / eps;
        let y = (p[1] - a[1]) / eps;
        let [v0, v1, v2, v3] = self.corner_vectors(cell)?;
        // Lower triangle conv(i, i+e1, i+e1+e2); upper conv(i, i+e2, i+e1+e2).
        let mut out = [0.0; 2];
        for k in 0..2 {
            out[k] = if x >= y {
                v0[k] + (v1[k] - v0[k]) * x + (v2[k] - v1[k]) * y
            } else {
                v0[k] + (v3[k] - v0[k]) * y + (v2[k] - v3[k]) * x
            };
        }
        Ok(out)
    }

    /// Exact Dirichlet integral of the interpolant over one cell.
    ///
    /// The gradient is constant on each of the two triangles, so the
    /// integral reduces to half the sum of the squared edge differences of
    /// the four cell sides, matching the XY energy of the cell.
    pub fn cell_dirichlet(&self, cell: Cell) -> Result<f64> {
        let [v0, v1, v2, v3] = self.corner_vectors(cell)?;
        let e = |p: [f64; 2], q: [f64; 2]| {
            let dx = q[0] - p[0];
            let dy = q[1] - p[1];
            dx * dx + dy * dy
        };
        Ok(0.5 * (e(v0, v1) + e(v1, v2) + e(v3, v2) + e(v0, v3)))
    }
}
