//! Geometry and indexing of the scaled square lattice.
//!
//! Sites are addressed by exact integer pairs; physical positions are
//! derived on demand as `spacing * (i1, i2)`. All membership queries go
//! through [`Domain`], which distinguishes open shapes (discs, annuli,
//! punctured domains) from closed rectangles.

use crate::error::{CoreError, Result};
use serde::{Deserialize, Serialize};

/// A lattice site, stored as exact integer coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub i1: i64,
    pub i2: i64,
}

impl Site {
    pub fn new(i1: i64, i2: i64) -> Self {
        Site { i1, i2 }
    }

    pub fn offset(self, d1: i64, d2: i64) -> Self {
        Site::new(self.i1 + d1, self.i2 + d2)
    }

    /// Componentwise partial order `i <= j` used by the elastic increment
    /// orientation convention.
    pub fn leq(self, other: Site) -> bool {
        self.i1 <= other.i1 && self.i2 <= other.i2
    }
}

/// Scaled square lattice `spacing * Z^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeGeometry {
    spacing: f64,
}

impl LatticeGeometry {
    pub fn new(spacing: f64) -> Result<Self> {
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(CoreError::BadSpacing(spacing));
        }
        Ok(LatticeGeometry { spacing })
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn position(&self, site: Site) -> [f64; 2] {
        [self.spacing * site.i1 as f64, self.spacing * site.i2 as f64]
    }

    /// Geometry of the double-spaced lattice `2 spacing * Z^2`.
    pub fn doubled(&self) -> LatticeGeometry {
        LatticeGeometry { spacing: 2.0 * self.spacing }
    }
}

/// One of the four shifted double-spaced sublattices, or one of the two
/// row-parity classes they combine into.
///
/// `S0..S3` partition the lattice via the coordinate parities
/// `(i1 mod 2, i2 mod 2) = (0,0), (1,0), (0,1), (1,1)`. `Even` is `S0 ∪ S1`
/// (even rows) and `Odd` is `S2 ∪ S3` (odd rows).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SublatticeTag {
    S0,
    S1,
    S2,
    S3,
    Even,
    Odd,
}

impl SublatticeTag {
    pub const SHIFTS: [SublatticeTag; 4] =
        [SublatticeTag::S0, SublatticeTag::S1, SublatticeTag::S2, SublatticeTag::S3];

    pub fn contains(self, site: Site) -> bool {
        let p1 = site.i1.rem_euclid(2);
        let p2 = site.i2.rem_euclid(2);
        match self {
            SublatticeTag::S0 => p1 == 0 && p2 == 0,
            SublatticeTag::S1 => p1 == 1 && p2 == 0,
            SublatticeTag::S2 => p1 == 0 && p2 == 1,
            SublatticeTag::S3 => p1 == 1 && p2 == 1,
            SublatticeTag::Even => p2 == 0,
            SublatticeTag::Odd => p2 == 1,
        }
    }

    /// Integer shift `(s1, s2)` of the sublattice anchor, for `S0..S3`.
    pub fn shift(self) -> Option<(i64, i64)> {
        match self {
            SublatticeTag::S0 => Some((0, 0)),
            SublatticeTag::S1 => Some((1, 0)),
            SublatticeTag::S2 => Some((0, 1)),
            SublatticeTag::S3 => Some((1, 1)),
            _ => None,
        }
    }
}

/// Lattice direction of a bond.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    E1,
    E2,
}

impl Direction {
    pub fn step(self) -> (i64, i64) {
        match self {
            Direction::E1 => (1, 0),
            Direction::E2 => (0, 1),
        }
    }
}

/// A circular hole removed from a punctured domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hole {
    pub center: [f64; 2],
    pub radius: f64,
}

/// Bounded planar region. Discs, annuli and punctured domains are open
/// (strict interior membership); rectangles are closed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Disc { center: [f64; 2], radius: f64 },
    Rect { min: [f64; 2], max: [f64; 2] },
    Annulus { center: [f64; 2], inner: f64, outer: f64 },
    Punctured { base: Box<Domain>, holes: Vec<Hole> },
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

/// Distance from `p` to the closed segment `[a, b]`.
fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let vx = b[0] - a[0];
    let vy = b[1] - a[1];
    let len2 = vx * vx + vy * vy;
    if len2 == 0.0 {
        return dist2(p, a).sqrt();
    }
    let t = (((p[0] - a[0]) * vx + (p[1] - a[1]) * vy) / len2).clamp(0.0, 1.0);
    let q = [a[0] + t * vx, a[1] + t * vy];
    dist2(p, q).sqrt()
}

impl Domain {
    pub fn disc(center: [f64; 2], radius: f64) -> Self {
        Domain::Disc { center, radius }
    }

    pub fn rect(min: [f64; 2], max: [f64; 2]) -> Self {
        Domain::Rect { min, max }
    }

    pub fn annulus(center: [f64; 2], inner: f64, outer: f64) -> Self {
        Domain::Annulus { center, inner, outer }
    }

    /// The punctured domain obtained by removing the closed discs
    /// `B_sigma(x_h)`. Fails unless the discs are pairwise disjoint and
    /// contained in the base domain.
    pub fn punctured(base: Domain, holes: Vec<Hole>) -> Result<Self> {
        for (k, h) in holes.iter().enumerate() {
            if !(h.radius > 0.0) {
                return Err(CoreError::Geometry(format!("hole {k} has nonpositive radius")));
            }
            // B_sigma(x_h) ⊂ base: check the center is inside with margin.
            if base.boundary_distance(h.center) < h.radius {
                return Err(CoreError::Geometry(format!(
                    "hole {k} is not contained in the base domain"
                )));
            }
            for (j, g) in holes.iter().enumerate().take(k) {
                if dist2(h.center, g.center).sqrt() <= h.radius + g.radius {
                    return Err(CoreError::Geometry(format!("holes {j} and {k} overlap")));
                }
            }
        }
        Ok(Domain::Punctured { base: Box::new(base), holes })
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        match self {
            Domain::Disc { center, radius } => dist2(p, *center) < radius * radius,
            Domain::Rect { min, max } => {
                p[0] >= min[0] && p[0] <= max[0] && p[1] >= min[1] && p[1] <= max[1]
            }
            Domain::Annulus { center, inner, outer } => {
                let d2 = dist2(p, *center);
                d2 > inner * inner && d2 < outer * outer
            }
            Domain::Punctured { base, holes } => {
                base.contains(p)
                    && holes.iter().all(|h| dist2(p, h.center) > h.radius * h.radius)
            }
        }
    }

    /// Whether the closed segment `[a, b]` lies inside the domain.
    pub fn contains_segment(&self, a: [f64; 2], b: [f64; 2]) -> bool {
        match self {
            // Convex shapes: both endpoints suffice.
            Domain::Disc { .. } | Domain::Rect { .. } => self.contains(a) && self.contains(b),
            Domain::Annulus { center, inner, .. } => {
                self.contains(a)
                    && self.contains(b)
                    && point_segment_distance(*center, a, b) > *inner
            }
            Domain::Punctured { base, holes } => {
                base.contains_segment(a, b)
                    && holes
                        .iter()
                        .all(|h| point_segment_distance(h.center, a, b) > h.radius)
            }
        }
    }

    /// Distance from an interior point to the topological boundary
    /// (0 for exterior points of open shapes).
    pub fn boundary_distance(&self, p: [f64; 2]) -> f64 {
        match self {
            Domain::Disc { center, radius } => (radius - dist2(p, *center).sqrt()).max(0.0),
            Domain::Rect { min, max } => {
                let dx = (p[0] - min[0]).min(max[0] - p[0]);
                let dy = (p[1] - min[1]).min(max[1] - p[1]);
                dx.min(dy).max(0.0)
            }
            Domain::Annulus { center, inner, outer } => {
                let r = dist2(p, *center).sqrt();
                (outer - r).min(r - inner).max(0.0)
            }
            Domain::Punctured { base, holes } => {
                let mut d = base.boundary_distance(p);
                for h in holes {
                    d = d.min(dist2(p, h.center).sqrt() - h.radius);
                }
                d.max(0.0)
            }
        }
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        match self {
            Domain::Disc { center, radius } => (
                [center[0] - radius, center[1] - radius],
                [center[0] + radius, center[1] + radius],
            ),
            Domain::Rect { min, max } => (*min, *max),
            Domain::Annulus { center, outer, .. } => (
                [center[0] - outer, center[1] - outer],
                [center[0] + outer, center[1] + outer],
            ),
            Domain::Punctured { base, .. } => base.bounding_box(),
        }
    }

    /// Intervals of the horizontal section `{x2 = y} ∩ Ω`, sorted by x.
    ///
    /// Supported for discs, rectangles and annuli; punctured domains are
    /// not sections the line-tension model needs.
    pub fn horizontal_section(&self, y: f64) -> Result<Vec<(f64, f64)>> {
        match self {
            Domain::Disc { center, radius } => {
                let dy = y - center[1];
                let w2 = radius * radius - dy * dy;
                if w2 <= 0.0 {
                    Ok(vec![])
                } else {
                    let w = w2.sqrt();
                    Ok(vec![(center[0] - w, center[0] + w)])
                }
            }
            Domain::Rect { min, max } => {
                if y >= min[1] && y <= max[1] {
                    Ok(vec![(min[0], max[0])])
                } else {
                    Ok(vec![])
                }
            }
            Domain::Annulus { center, inner, outer } => {
                let dy = y - center[1];
                let wo2 = outer * outer - dy * dy;
                if wo2 <= 0.0 {
                    return Ok(vec![]);
                }
                let wo = wo2.sqrt();
                let wi2 = inner * inner - dy * dy;
                if wi2 <= 0.0 {
                    Ok(vec![(center[0] - wo, center[0] + wo)])
                } else {
                    let wi = wi2.sqrt();
                    Ok(vec![
                        (center[0] - wo, center[0] - wi),
                        (center[0] + wi, center[0] + wo),
                    ])
                }
            }
            Domain::Punctured { .. } => Err(CoreError::Geometry(
                "horizontal sections of punctured domains are not supported".into(),
            )),
        }
    }

    /// Integer range of lattice indices covering the bounding box.
    pub fn index_range(&self, geom: &LatticeGeometry) -> (Site, Site) {
        let (lo, hi) = self.bounding_box();
        let eps = geom.spacing();
        let lo1 = (lo[0] / eps).floor() as i64 - 1;
        let lo2 = (lo[1] / eps).floor() as i64 - 1;
        let hi1 = (hi[0] / eps).ceil() as i64 + 1;
        let hi2 = (hi[1] / eps).ceil() as i64 + 1;
        (Site::new(lo1, lo2), Site::new(hi1, hi2))
    }
}

/// Closed lattice cell `Q = anchor + [0, span*eps]^2`. `span` is 1 for the
/// fine lattice and 2 for the double-spaced sublattice complexes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    pub anchor: Site,
    pub span: i64,
}

impl Cell {
    pub fn fine(anchor: Site) -> Self {
        Cell { anchor, span: 1 }
    }

    /// Corners in counterclockwise order starting from the anchor.
    pub fn corners(&self) -> [Site; 4] {
        let s = self.span;
        [
            self.anchor,
            self.anchor.offset(s, 0),
            self.anchor.offset(s, s),
            self.anchor.offset(0, s),
        ]
    }

    pub fn barycenter(&self, geom: &LatticeGeometry) -> [f64; 2] {
        let p = geom.position(self.anchor);
        let half = 0.5 * self.span as f64 * geom.spacing();
        [p[0] + half, p[1] + half]
    }

    fn contained_in(&self, domain: &Domain, geom: &LatticeGeometry) -> bool {
        let a = geom.position(self.anchor);
        let s = self.span as f64 * geom.spacing();
        let corners =
            [a, [a[0] + s, a[1]], [a[0] + s, a[1] + s], [a[0], a[1] + s]];
        if !corners.iter().all(|c| domain.contains(*c)) {
            return false;
        }
        match domain {
            // Convex: corner containment is equivalent to cell containment.
            Domain::Disc { .. } | Domain::Rect { .. } => true,
            Domain::Annulus { center, inner, .. } => {
                cell_point_distance(a, s, *center) > *inner
            }
            Domain::Punctured { base, holes } => {
                Cell { anchor: self.anchor, span: self.span }.contained_in(base, geom)
                    && holes.iter().all(|h| cell_point_distance(a, s, h.center) > h.radius)
            }
        }
    }
}

/// Distance from point `c` to the closed square with lower-left corner `a`
/// and side `s`.
fn cell_point_distance(a: [f64; 2], s: f64, c: [f64; 2]) -> f64 {
    let dx = (a[0] - c[0]).max(c[0] - (a[0] + s)).max(0.0);
    let dy = (a[1] - c[1]).max(c[1] - (a[1] + s)).max(0.0);
    (dx * dx + dy * dy).sqrt()
}

/// Which discrete boundary to take: the fine-lattice cell complex or the
/// union of the four double-spaced sublattice complexes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryLayer {
    Single,
    Double,
}

/// Sites of the tagged sublattice whose physical position lies in the
/// domain. `None` selects the whole lattice.
pub fn sites(
    domain: &Domain,
    geom: &LatticeGeometry,
    tag: Option<SublatticeTag>,
) -> Vec<Site> {
    let (lo, hi) = domain.index_range(geom);
    let mut out = Vec::new();
    for i2 in lo.i2..=hi.i2 {
        for i1 in lo.i1..=hi.i1 {
            let s = Site::new(i1, i2);
            if let Some(t) = tag {
                if !t.contains(s) {
                    continue;
                }
            }
            if domain.contains(geom.position(s)) {
                out.push(s);
            }
        }
    }
    out
}

/// Bonds `(i, i + span*eps*e_k)` whose full closed segment lies in the
/// domain. With a sublattice tag both endpoints must belong to the tagged
/// set, which for `S0..S3` forces `span == 2`.
pub fn bonds(
    domain: &Domain,
    geom: &LatticeGeometry,
    direction: Direction,
    span: i64,
    tag: Option<SublatticeTag>,
) -> Vec<(Site, Site)> {
    assert!(span == 1 || span == 2, "bond span must be 1 or 2");
    let (lo, hi) = domain.index_range(geom);
    let (d1, d2) = direction.step();
    let mut out = Vec::new();
    for i2 in lo.i2..=hi.i2 {
        for i1 in lo.i1..=hi.i1 {
            let a = Site::new(i1, i2);
            let b = a.offset(span * d1, span * d2);
            if let Some(t) = tag {
                if !t.contains(a) || !t.contains(b) {
                    continue;
                }
            }
            if domain.contains_segment(geom.position(a), geom.position(b)) {
                out.push((a, b));
            }
        }
    }
    out
}

/// Cells of the fine lattice fully contained in the domain.
pub fn cells(domain: &Domain, geom: &LatticeGeometry) -> Vec<Cell> {
    cells_with_span(domain, geom, 1, None)
}

/// Cells of a sublattice complex (`span == 2`, anchors on the tagged
/// sublattice) or of the fine lattice (`span == 1`, no tag).
pub fn cells_with_span(
    domain: &Domain,
    geom: &LatticeGeometry,
    span: i64,
    tag: Option<SublatticeTag>,
) -> Vec<Cell> {
    let (lo, hi) = domain.index_range(geom);
    let mut out = Vec::new();
    for i2 in lo.i2..=hi.i2 {
        for i1 in lo.i1..=hi.i1 {
            let anchor = Site::new(i1, i2);
            if let Some(t) = tag {
                if !t.contains(anchor) {
                    continue;
                }
            }
            let cell = Cell { anchor, span };
            if cell.contained_in(domain, geom) {
                out.push(cell);
            }
        }
    }
    out
}

/// Discrete boundary of the domain as a site set in the fine lattice.
///
/// `Single` takes the vertices of the topological boundary of the union of
/// fine cells contained in the domain. `Double` takes the union over the
/// four sublattices of the boundaries of the corresponding `2eps` cell
/// complexes; mid-edge fine-lattice sites on those boundaries are included.
/// Returns an empty set when no full cell fits inside the domain.
pub fn discrete_boundary(
    domain: &Domain,
    geom: &LatticeGeometry,
    layer: BoundaryLayer,
) -> Vec<Site> {
    use std::collections::HashSet;
    let mut out: HashSet<Site> = HashSet::new();
    let complexes: Vec<(i64, Option<SublatticeTag>)> = match layer {
        BoundaryLayer::Single => vec![(1, None)],
        BoundaryLayer::Double => {
            SublatticeTag::SHIFTS.iter().map(|t| (2, Some(*t))).collect()
        }
    };
    for (span, tag) in complexes {
        let in_cells: HashSet<Site> =
            cells_with_span(domain, geom, span, tag).into_iter().map(|c| c.anchor).collect();
        for &anchor in &in_cells {
            // Edge (direction, neighbour anchor offset, edge start corner).
            let sides = [
                ((0, -span), anchor, (1, 0)),                  // bottom
                ((0, span), anchor.offset(0, span), (1, 0)),   // top
                ((-span, 0), anchor, (0, 1)),                  // left
                ((span, 0), anchor.offset(span, 0), (0, 1)),   // right
            ];
            for ((n1, n2), start, (e1, e2)) in sides {
                if in_cells.contains(&anchor.offset(n1, n2)) {
                    continue;
                }
                // Boundary edge: collect its fine-lattice points.
                for t in 0..=span {
                    out.insert(start.offset(e1 * t, e2 * t));
                }
            }
        }
    }
    let mut v: Vec<Site> = out.into_iter().collect();
    v.sort();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(eps: f64) -> LatticeGeometry {
        LatticeGeometry::new(eps).unwrap()
    }

    #[test]
    fn sites_in_small_disc() {
        // |eps*i| < 1 with eps = 0.5: the axis sites plus the four
        // diagonal sites at distance sqrt(2)/2.
        let g = geom(0.5);
        let d = Domain::disc([0.0, 0.0], 1.0);
        let s = sites(&d, &g, None);
        assert_eq!(s.len(), 9);
        for want in [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1)] {
            assert!(s.contains(&Site::new(want.0, want.1)));
        }
        assert!(!s.contains(&Site::new(2, 0)));
    }

    #[test]
    fn sites_sublattice_in_unit_square() {
        let g = geom(0.5);
        let d = Domain::rect([0.0, 0.0], [1.0, 1.0]);
        let s0 = sites(&d, &g, Some(SublatticeTag::S0));
        // Even-even indices inside [0,1]^2: i in {0,2} x {0,2}.
        assert_eq!(s0.len(), 4);
        assert!(s0.iter().all(|s| s.i1 % 2 == 0 && s.i2 % 2 == 0));
    }

    #[test]
    fn sites_match_bruteforce_scan_on_random_discs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let g = geom(0.1 + rng.gen::<f64>() * 0.3);
            let c = [rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0];
            let r = 0.3 + rng.gen::<f64>() * 1.2;
            let d = Domain::disc(c, r);
            let got = sites(&d, &g, None);
            // Independent oracle: scan a generous integer box.
            let b = ((r + c[0].abs() + c[1].abs()) / g.spacing()).ceil() as i64 + 2;
            let mut want = Vec::new();
            for i2 in -b..=b {
                for i1 in -b..=b {
                    let p = g.position(Site::new(i1, i2));
                    if dist2(p, c) < r * r {
                        want.push(Site::new(i1, i2));
                    }
                }
            }
            assert_eq!(got, want);
        }
    }

    #[test]
    fn partition_into_sublattices() {
        let g = geom(0.25);
        let d = Domain::disc([0.1, -0.2], 1.0);
        let all = sites(&d, &g, None);
        let mut count = 0;
        for t in SublatticeTag::SHIFTS {
            count += sites(&d, &g, Some(t)).len();
        }
        assert_eq!(all.len(), count);
        let even = sites(&d, &g, Some(SublatticeTag::Even));
        let odd = sites(&d, &g, Some(SublatticeTag::Odd));
        assert_eq!(all.len(), even.len() + odd.len());
        for s in &all {
            let tags: Vec<_> = SublatticeTag::SHIFTS
                .iter()
                .filter(|t| t.contains(*s))
                .collect();
            assert_eq!(tags.len(), 1);
        }
    }

    #[test]
    fn bonds_in_single_cell_square() {
        let g = geom(0.5);
        let d = Domain::rect([0.0, 0.0], [0.5, 0.5]);
        let h = bonds(&d, &g, Direction::E1, 1, None);
        assert_eq!(h.len(), 2);
        let v = bonds(&d, &g, Direction::E2, 1, None);
        assert_eq!(v.len(), 2);
    }

    #[test]
    fn bonds_empty_domain() {
        let g = geom(0.5);
        let d = Domain::disc([10.0, 10.0], 0.1);
        assert!(bonds(&d, &g, Direction::E1, 1, None).is_empty());
    }

    #[test]
    fn span2_bonds_match_segment_sampling_oracle() {
        let g = geom(0.5);
        let d = Domain::disc([0.0, 0.0], 2.1 * 0.5);
        let got = bonds(&d, &g, Direction::E2, 2, None);
        // Oracle: dense sampling of the segment.
        let (lo, hi) = d.index_range(&g);
        let mut want = Vec::new();
        for i2 in lo.i2..=hi.i2 {
            for i1 in lo.i1..=hi.i1 {
                let a = Site::new(i1, i2);
                let b = a.offset(0, 2);
                let pa = g.position(a);
                let pb = g.position(b);
                let inside = (0..=200).all(|k| {
                    let t = k as f64 / 200.0;
                    d.contains([pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])])
                });
                if inside {
                    want.push((a, b));
                }
            }
        }
        assert_eq!(got, want);
    }

    #[test]
    fn sublattice_bonds_use_double_steps() {
        let g = geom(0.25);
        let d = Domain::rect([0.0, 0.0], [2.0, 2.0]);
        for t in SublatticeTag::SHIFTS {
            for b in bonds(&d, &g, Direction::E1, 2, Some(t)) {
                assert!(t.contains(b.0) && t.contains(b.1));
                assert_eq!(b.1.i1 - b.0.i1, 2);
            }
            // Span-1 bonds never stay on a shifted sublattice.
            assert!(bonds(&d, &g, Direction::E1, 1, Some(t)).is_empty());
        }
    }

    #[test]
    fn cells_of_two_by_two_block() {
        let g = geom(0.5);
        let d = Domain::rect([0.0, 0.0], [1.0, 1.0]);
        let c = cells(&d, &g);
        assert_eq!(c.len(), 4);
        for cell in &c {
            let b = cell.barycenter(&g);
            assert!(d.contains(b));
        }
    }

    #[test]
    fn cells_corner_check_oracle_on_disc() {
        let g = geom(0.5);
        let d = Domain::disc([0.0, 0.0], 0.75);
        for cell in cells(&d, &g) {
            for corner in cell.corners() {
                assert!(d.contains(g.position(corner)));
            }
        }
    }

    #[test]
    fn boundary_of_square_block() {
        // [0, 2eps]^2 single layer: 8 perimeter sites of the 3x3 block.
        let g = geom(0.5);
        let d = Domain::rect([0.0, 0.0], [1.0, 1.0]);
        let b = discrete_boundary(&d, &g, BoundaryLayer::Single);
        assert_eq!(b.len(), 8);
        assert!(!b.contains(&Site::new(1, 1)));
    }

    #[test]
    fn boundary_ring_cell_marking_oracle() {
        let g = geom(0.125);
        let d = Domain::disc([0.0, 0.0], 0.5); // sigma = 4 eps
        let ring = discrete_boundary(&d, &g, BoundaryLayer::Single);
        assert!(!ring.is_empty());
        use std::collections::HashSet;
        let in_cells: HashSet<Site> = cells(&d, &g).into_iter().map(|c| c.anchor).collect();
        for s in &ring {
            let incident = [(0, 0), (-1, 0), (0, -1), (-1, -1)];
            let n_in = incident
                .iter()
                .filter(|(a, b)| in_cells.contains(&s.offset(*a, *b)))
                .count();
            assert!(n_in >= 1 && n_in <= 3, "site {s:?} has {n_in} incident cells");
        }
    }

    #[test]
    fn double_layer_contains_sublattice_rings() {
        let g = geom(0.0625);
        let d = Domain::disc([0.0, 0.0], 0.5); // sigma = 8 eps
        let double = discrete_boundary(&d, &g, BoundaryLayer::Double);
        use std::collections::HashSet;
        let set: HashSet<Site> = double.iter().copied().collect();
        // Oracle: recompute each sublattice complex boundary directly.
        for t in SublatticeTag::SHIFTS {
            let in_cells: HashSet<Site> =
                cells_with_span(&d, &g, 2, Some(t)).into_iter().map(|c| c.anchor).collect();
            for &a in &in_cells {
                for (off, start, dir) in [
                    ((0, -2), a, (1, 0)),
                    ((0, 2), a.offset(0, 2), (1, 0)),
                    ((-2, 0), a, (0, 1)),
                    ((2, 0), a.offset(2, 0), (0, 1)),
                ] {
                    if !in_cells.contains(&a.offset(off.0, off.1)) {
                        for k in 0..=2 {
                            assert!(set.contains(&start.offset(dir.0 * k, dir.1 * k)));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn monotone_and_translation_covariant() {
        let g = geom(0.25);
        let small = Domain::disc([0.0, 0.0], 0.7);
        let big = Domain::disc([0.0, 0.0], 1.0);
        let ss: std::collections::HashSet<_> = sites(&small, &g, None).into_iter().collect();
        let bs: std::collections::HashSet<_> = sites(&big, &g, None).into_iter().collect();
        assert!(ss.is_subset(&bs));

        // Shift domain by eps * (3, -2): index sets shift by (3, -2).
        let shifted = Domain::disc([0.75, -0.5], 0.7);
        let got = sites(&shifted, &g, None);
        let want: Vec<Site> =
            sites(&small, &g, None).into_iter().map(|s| s.offset(3, -2)).collect();
        assert_eq!(got, want);
    }
}
