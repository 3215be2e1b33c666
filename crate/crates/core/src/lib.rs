//! Finite-type log-Riemann surfaces represented as slit planes glued along
//! their slits.
//!
//! The crate is split into three layers:
//!
//! * [`sheet_complex`]: the data model (sheets, slits, gluings, half-line
//!   families), its JSON document form, the validator, the model-family
//!   builder and straight-segment lifting.
//! * [`skeleton`] and [`ends`]: the combinatorial invariants (skeleton graph,
//!   ramification census, finite completion, Betti numbers, circle lifts,
//!   ends, end indices, embedding witnesses and the genus/puncture census).
//! * [`numerics`]: quadrature of exponential 1-forms `Q(z) e^{P(z)} dz`,
//!   asymptotic values, exact residues, the rational approximants and the
//!   metric-completion probe.
//!
//! [`export`] renders skeletons as DOT and sheet complexes as SVG.

pub mod ends;
pub mod export;
pub mod numerics;
pub mod sheet_complex;
pub mod skeleton;

pub use num_complex::Complex64;

pub use sheet_complex::{
    build_model_surface, lift_segment, validate, HalfLineFamily, LiftOutcome, LiftedPath, ModelParams, Order,
    Orientation, RamPoint, SheetAddr, SheetComplex, SheetPoint, SheetProto, Side, SideRef, Slit,
    SurfaceDoc, SurfaceError, ValidationReport,
};
