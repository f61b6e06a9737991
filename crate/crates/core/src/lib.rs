//! Discrete dislocation energies on the square lattice.
//!
//! This crate implements the numerical toolkit behind a family of lattice
//! models for edge dislocations, partial edge dislocations and stacking
//! faults in two dimensions:
//!
//! * [`lattice`] — geometry and indexing of the scaled square lattice, its
//!   cells, discrete boundaries and the four shifted double-spaced
//!   sublattices;
//! * [`fields`] — displacement and spin fields, liftings, sublattice
//!   restrictions and piecewise-affine interpolation;
//! * [`vorticity`] — discrete derivative calculus, plaquette circulation,
//!   vorticity measures, winding numbers and the flat distance between
//!   finite charge configurations;
//! * [`energies`] — the interaction potentials and the five discrete
//!   energies (edge, partial-edge, screw, XY, weak membrane) together with
//!   the comparison identities relating them;
//! * [`continuum`] — continuum reference quantities: the Poisson potential
//!   of a charge configuration, its renormalized energy, and the canonical
//!   harmonic map;
//! * [`minimize`] — exact coordinate descent for the piecewise-quadratic
//!   lattice energies with Dirichlet site data, and the core-energy
//!   extrapolation ladders;
//! * [`stacking`] — stacking-fault geometry, line-tension optimization and
//!   the two-coloring of boundary-to-boundary chords;
//! * [`configurations`] — generators for explicit fields: vortex liftings
//!   with prescribed cuts, discrete vortices, even/odd half-vortices and
//!   the recovery configuration.

pub mod configurations;
pub mod continuum;
pub mod energies;
pub mod error;
pub mod fields;
pub mod lattice;
pub mod minimize;
pub mod stacking;
pub mod vorticity;

pub use error::CoreError;
pub use lattice::{BoundaryLayer, Cell, Domain, LatticeGeometry, Site, SublatticeTag};
pub use vorticity::VorticityMeasure;
